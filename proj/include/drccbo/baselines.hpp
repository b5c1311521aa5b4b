#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "drccbo/ambiguity.hpp"
#include "drccbo/core.hpp"
#include "drccbo/gp.hpp"
#include "drccbo/grid.hpp"
#include "drccbo/rng.hpp"

namespace drccbo {

enum class Setting { Simulator, Uncontrollable };

struct BaselineConfig {
    double drptr_gamma = 0.1;
    std::size_t ccbo_mc_samples = 1000;
};

struct Selection {
    std::size_t x_index;
    std::optional<std::size_t> w_index;  // absent in the uncontrollable setting
};

Selection random_select(const GridSpace& grid, Rng& rng, Setting setting);

/// Maximum-posterior-variance sweep. The uncontrollable variant averages the
/// score over the empirical distribution of w (must be nonempty).
Selection us_select(const GridSpace& grid, const GridPosteriorCache& post_f,
                    const GridPosteriorCache& post_g, Setting setting,
                    const DiscreteDistribution* empirical_w);

/// Objective-only policy: x maximizes u^F, w maximizes the f-variance slice.
Selection drbo_select(const GridSpace& grid, const BoundsTable& bounds,
                      const GridPosteriorCache& post_f);

/// Expected-classification-improvement policy. The expectation over the
/// hypothetical observation is evaluated exactly: each per-w indicator bound
/// flips at an affine threshold in y*, so the post-update l^G is a step
/// function with at most |Omega| breakpoints per design.
Selection drptr_select(const GridSpace& grid, const GpPosterior& gp_g,
                       const GridPosteriorCache& post_g, const BoundsTable& bounds,
                       const AmbiguitySet& set, double beta_g, double h, double eta,
                       double alpha, const BaselineConfig& config, Setting setting,
                       const DiscreteDistribution* empirical_w);

/// Per-candidate DRPTR score (exposed for oracle tests).
double drptr_score(const GridSpace& grid, const GpPosterior& gp_g,
                   const GridPosteriorCache& post_g, const BoundsTable& bounds,
                   const AmbiguitySet& set, double beta_g, double h, double eta,
                   double alpha, double gamma, std::size_t cand_x, std::size_t cand_w);

/// Expected-feasible-improvement policy with Monte-Carlo feasibility
/// probabilities; w minimizes the MC variance of the one-step score.
Selection ccbo_select(const GridSpace& grid, const GpPosterior& gp_f,
                      const GpPosterior& gp_g, const GridPosteriorCache& post_f,
                      const GridPosteriorCache& post_g,
                      const DiscreteDistribution& reference, double alpha, double h,
                      const BaselineConfig& config, Rng& rng);

/// Mean and variance of the reference-weighted objective functional at one
/// design (exposed for oracle tests).
PosteriorMoments ccbo_objective_moments(const GridSpace& grid, const GpPosterior& gp_f,
                                        std::size_t x_index,
                                        const DiscreteDistribution& reference);

/// Closed-form Gaussian expected improvement E[max{Z - c, 0}].
double gaussian_expected_improvement(double mean, double variance, double c);

}  // namespace drccbo
