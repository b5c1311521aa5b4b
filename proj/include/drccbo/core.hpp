#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "drccbo/ambiguity.hpp"
#include "drccbo/gp.hpp"
#include "drccbo/grid.hpp"

namespace drccbo {

enum class Label { H, L, M };

struct DesignBounds {
    double lf, uf;  // credible interval for the DR expectation
    double lg, ug;  // credible interval for the DR probability, in [0, 1]
    Label label;
};

/// Per-design bounds and H/L/M classification for one iteration.
struct BoundsTable {
    std::vector<DesignBounds> rows;  // indexed by design

    std::size_t size() const { return rows.size(); }
    bool any(Label l) const;
    std::size_t count(Label l) const;
};

enum class StopKind { Continue, NoSolution, Converged };

struct StopStatus {
    StopKind kind;
    std::optional<std::size_t> recommendation;  // set when Converged
};

struct Interval {
    double lower, upper;
};

// ---- parameter schedules ----

/// beta_t = 2 log(2 |X x Omega| pi^2 t^2 / (3 delta)).
double beta_schedule(std::size_t t, std::size_t product_size, double delta);

/// min{ xi s / 2, xi^2 delta s / (8 |X x Omega|) } with s the minimum prior
/// standard deviation of g.
double eta_parameter(double xi, double delta, double sigma0min_g,
                     std::size_t product_size);

// ---- pointwise intervals ----

Interval credible_interval(const GpPosterior& gp, const Point& q, double beta);

/// Indicator envelope: [1,1] if l_g > h - eta; [0,1] if u_g > h; else [0,0].
Interval indicator_interval(double l_g, double u_g, double h, double eta);

// ---- per-design bounds ----

Interval f_bounds(const GridSpace& grid, std::size_t x_index, const GpPosterior& gp_f,
                  double beta_f, const AmbiguitySet& set);

Interval g_bounds(const GridSpace& grid, std::size_t x_index, const GpPosterior& gp_g,
                  double beta_g, double h, double eta, const AmbiguitySet& set);

Label classify(double lg, double ug, double alpha, double xi);

/// Whole-table sweep from precomputed posterior moments over the grid.
/// Equivalent to calling f_bounds/g_bounds/classify per design.
BoundsTable compute_bounds_table(const GridSpace& grid, const GridPosteriorCache& post_f,
                                 const GridPosteriorCache& post_g, double beta_f,
                                 double beta_g, double h, double eta, double alpha,
                                 double xi, const AmbiguitySet& set);

// ---- selection and stopping ----

double current_best(const BoundsTable& table);

double acquisition(std::size_t x_index, const BoundsTable& table, double cbest,
                   double alpha, double xi);

/// argmax of the acquisition over H union M; lowest index on ties.
std::size_t select_x(const BoundsTable& table, std::span<const double> acq);

/// argmax over Omega of var_f + var_g at the chosen design; lowest index ties.
std::size_t select_w_simulator(const GridSpace& grid, std::size_t x_next,
                               const GpPosterior& gp_f, const GpPosterior& gp_g);

std::size_t select_w_simulator(const GridSpace& grid, std::size_t x_next,
                               const GridPosteriorCache& post_f,
                               const GridPosteriorCache& post_g);

StopStatus stopping(const BoundsTable& table, double xi);

}  // namespace drccbo
