#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "drccbo/grid.hpp"

namespace drccbo {

/// Probability vector on Omega. Weights are nonnegative and sum to 1
/// within 1e-12 (checked at construction).
class DiscreteDistribution {
  public:
    explicit DiscreteDistribution(std::vector<double> weights);

    static DiscreteDistribution uniform(std::size_t n);

    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }

  private:
    std::vector<double> weights_;
};

/// L1 ball of radius epsilon around a reference distribution, intersected
/// with the probability simplex.
struct AmbiguitySet {
    DiscreteDistribution reference;
    double radius;  // epsilon_t, >= 0

    AmbiguitySet(DiscreteDistribution ref, double eps);
};

/// Sum of absolute coordinate differences; in [0, 2] for distributions.
double l1_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// inf over p in the set of sum_w costs(w) * p(w), solved exactly: mass is
/// stripped greedily from the highest-cost coordinates (capped by their
/// reference weight) onto the minimum-cost coordinate; moving total mass d
/// spends L1 budget 2d, so d <= radius / 2.
double worst_case_expectation(std::span<const double> costs, const AmbiguitySet& set);

/// Empirical distribution of the observed environment indices.
DiscreteDistribution empirical_reference(std::span<const std::size_t> observed,
                                         const GridSpace& grid);

/// Data-driven radius: |Omega| * sqrt(log(|Omega| pi^2 t^2 / (3 delta)) / (2t)).
double epsilon_schedule(std::size_t t, std::size_t omega_size, double delta);

}  // namespace drccbo
