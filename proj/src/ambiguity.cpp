#include "drccbo/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "drccbo/simd_ops.hpp"

namespace drccbo {

DiscreteDistribution::DiscreteDistribution(std::vector<double> weights)
    : weights_(std::move(weights)) {
    if (weights_.empty())
        throw std::invalid_argument("DiscreteDistribution: empty weight vector");
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0))
            throw std::invalid_argument("DiscreteDistribution: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("DiscreteDistribution: weights do not sum to 1");
}

DiscreteDistribution DiscreteDistribution::uniform(std::size_t n) {
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    // Renormalize so the sum is exact for any n.
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= sum;
    return DiscreteDistribution(std::move(w));
}

AmbiguitySet::AmbiguitySet(DiscreteDistribution ref, double eps)
    : reference(std::move(ref)), radius(eps) {
    if (!(eps >= 0.0))
        throw std::invalid_argument("AmbiguitySet: negative radius");
}

double l1_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("l1_distance: dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
    return d;
}

double worst_case_expectation(std::span<const double> costs, const AmbiguitySet& set) {
    const std::size_t n = costs.size();
    if (n != set.reference.size())
        throw std::invalid_argument("worst_case_expectation: dimension mismatch");

    const double base = simd::active().dot(costs.data(), set.reference.weights().data(), n);
    if (set.radius == 0.0)
        return base;

    // Destination: minimum-cost coordinate, lowest index on ties.
    std::size_t jmin = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (costs[i] < costs[jmin])
            jmin = i;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (costs[a] != costs[b])
            return costs[a] > costs[b];
        return a < b;
    });

    double budget = set.radius / 2.0;
    double savings = 0.0;
    for (std::size_t i : order) {
        if (budget <= 0.0)
            break;
        if (i == jmin || costs[i] <= costs[jmin])
            break;
        const double m = std::min(set.reference[i], budget);
        savings += m * (costs[i] - costs[jmin]);
        budget -= m;
    }
    return base - savings;
}

DiscreteDistribution empirical_reference(std::span<const std::size_t> observed,
                                         const GridSpace& grid) {
    if (observed.empty())
        throw std::invalid_argument("empirical_reference: empty observation sequence");
    std::vector<double> w(grid.n_w(), 0.0);
    for (std::size_t wi : observed) {
        if (wi >= w.size())
            throw std::out_of_range("empirical_reference: index outside Omega");
        w[wi] += 1.0;
    }
    for (double& v : w) v /= static_cast<double>(observed.size());
    return DiscreteDistribution(std::move(w));
}

double epsilon_schedule(std::size_t t, std::size_t omega_size, double delta) {
    if (t < 1)
        throw std::invalid_argument("epsilon_schedule: t must be >= 1");
    const double td = static_cast<double>(t);
    const double m = static_cast<double>(omega_size);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return m * std::sqrt(std::log(m * pi2 * td * td / (3.0 * delta)) / (2.0 * td));
}

}  // namespace drccbo
