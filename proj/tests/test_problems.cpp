#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "drccbo/problems.hpp"
#include "drccbo/rng.hpp"

using namespace drccbo;

TEST_CASE("synthetic objective frozen values and symmetry") {
    CHECK(synthetic_f(0.0, 0.0) ==
          doctest::Approx(2.0000000559335820).epsilon(1e-14));
    CHECK(synthetic_f(8.0, 8.0) ==
          doctest::Approx(1.2000002250703494).epsilon(1e-14));
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const double x = 20.0 * rng.uniform() - 10.0;
        const double w = 20.0 * rng.uniform() - 10.0;
        CHECK(synthetic_f(x, w) == synthetic_f(w, x));
        CHECK(synthetic_f(x, w) > 0.0);
        CHECK(synthetic_f(x, w) < 3.8);
    }
}

TEST_CASE("synthetic constraint is the nonnegative symmetric quadratic") {
    CHECK(synthetic_g(0.0, 0.0) == 0.0);
    CHECK(synthetic_g(1.0, 1.0) == doctest::Approx(0.04).epsilon(1e-14));
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        const double x = 20.0 * rng.uniform() - 10.0;
        const double w = 20.0 * rng.uniform() - 10.0;
        CHECK(synthetic_g(x, w) == synthetic_g(w, x));
        CHECK(synthetic_g(x, w) >= 0.0);
        CHECK(synthetic_g(x, x) == doctest::Approx(0.04 * x * x).epsilon(1e-12));
    }
}

TEST_CASE("synthetic instance covers the 50x50 grid") {
    const ProblemInstance inst = make_synthetic_instance(true);
    CHECK(inst.grid.n_x() == 50);
    CHECK(inst.grid.n_w() == 50);
    CHECK(inst.f_table.size() == 2500);
    CHECK(inst.g_table.size() == 2500);
    REQUIRE(inst.true_distribution.has_value());
    CHECK(inst.f_at(0, 0) == synthetic_f(-10.0, -10.0));
    CHECK(inst.g_at(49, 0) == synthetic_g(10.0, -10.0));
    CHECK_FALSE(make_synthetic_instance(false).true_distribution.has_value());
}

TEST_CASE("environment mixture is bimodal and symmetric") {
    const std::vector<double> w = make_grid(-10.0, 10.0, 50);
    const DiscreteDistribution d = true_mixture_distribution(w);
    double sum = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) sum += d[i];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // Symmetric grid: weight(w) = weight(-w).
    for (std::size_t i = 0; i < d.size(); ++i)
        CHECK(d[i] == doctest::Approx(d[d.size() - 1 - i]).epsilon(1e-12));
    // Mode weights near +-5 exceed the weight at the center.
    const auto near = [&](double target) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < w.size(); ++i)
            if (std::abs(w[i] - target) < std::abs(w[best] - target))
                best = i;
        return best;
    };
    CHECK(d[near(-5.0)] > d[near(0.0)]);
    CHECK(d[near(5.0)] > d[near(0.0)]);
}

TEST_CASE("epidemic integrator conserves population and matches a replica") {
    const SirSettings cfg{};
    // Independent Euler replica with explicit conservation tracking.
    auto replica = [&](double b, double g) {
        double s = cfg.s0, i = cfg.i0, r = cfg.r0;
        const double n = s + i + r;
        double peak = i;
        const auto steps = static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
        double worst_drift = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            const double inf = b * i * s / n * cfg.dt;
            const double rem = g * i * cfg.dt;
            s -= inf;
            i += inf - rem;
            r += rem;
            peak = std::max(peak, i);
            worst_drift = std::max(worst_drift, std::abs(s + i + r - n));
        }
        return std::pair{peak, worst_drift};
    };
    const auto [p1, d1] = replica(0.3, 0.1);
    CHECK(d1 < 1e-9);
    CHECK(sir_simulate(0.3, 0.1, cfg) == doctest::Approx(p1).epsilon(1e-12));
    // Strong isolation, weak contact: infections only decay; the peak is I0.
    CHECK(sir_simulate(0.01, 0.5, cfg) == 10.0);
    // Monotone responses.
    CHECK(sir_simulate(0.5, 0.01, cfg) > sir_simulate(0.1, 0.01, cfg));
    CHECK(sir_simulate(0.4, 0.02, cfg) > sir_simulate(0.4, 0.2, cfg));
}

TEST_CASE("peak table cache round-trips and rejects stale headers") {
    SirSettings small{};
    small.grid_n = 4;
    small.dt = 0.01;
    const std::string path = "sir_cache_test.txt";
    std::filesystem::remove(path);
    const std::vector<double> fresh = sir_peak_table(small, path);
    REQUIRE(fresh.size() == 16);
    const std::vector<double> cached = sir_peak_table(small, path);
    CHECK(fresh == cached);
    // A settings change invalidates the cache and regenerates.
    small.dt = 0.02;
    const std::vector<double> regen = sir_peak_table(small, path);
    CHECK(regen.size() == 16);
    CHECK(regen != fresh);
    std::filesystem::remove(path);
}

TEST_CASE("risk shift makes extrema symmetric around zero") {
    SirSettings small{};
    small.grid_n = 6;
    small.dt = 0.01;
    const std::vector<double> axis = make_grid(small.grid_lo, small.grid_hi, small.grid_n);
    const GridSpace grid(axis, axis);
    const std::vector<double> peak = sir_peak_table(small, "");
    const RiskTables risks = risk_functions(grid, peak);
    const auto check_sym = [](const std::vector<double>& t) {
        const auto [mn, mx] = std::minmax_element(t.begin(), t.end());
        CHECK(*mx == doctest::Approx(-*mn).epsilon(1e-9));
    };
    check_sym(risks.r1);
    check_sym(risks.r2);
    // The shift constant itself is the midpoint of the unshifted range.
    const auto [mn, mx] = std::minmax_element(peak.begin(), peak.end());
    CHECK(risks.c2 == doctest::Approx((*mn + *mx) / 2.0).epsilon(1e-12));
}

TEST_CASE("true worst-case values and the exact optimum") {
    // Tiny hand-checkable instance: f prefers x1, but x1 is infeasible.
    const GridSpace grid(make_grid(0.0, 1.0, 2), make_grid(0.0, 1.0, 2));
    ProblemInstance inst{grid, {1.0, 1.0, 5.0, 5.0}, {9.0, 9.0, 0.0, 0.0},
                         std::nullopt};
    const AmbiguitySet set(DiscreteDistribution::uniform(2), 0.0);
    const double h = 5.0, alpha = 0.53;
    CHECK(true_f_value(inst, 0, set) == doctest::Approx(1.0));
    CHECK(true_f_value(inst, 1, set) == doctest::Approx(5.0));
    CHECK(true_g_value(inst, 0, h, set) == doctest::Approx(1.0));
    CHECK(true_g_value(inst, 1, h, set) == doctest::Approx(0.0));
    const ExactOptimum opt = exact_optimum(inst, set, alpha, h);
    REQUIRE(opt.x_index.has_value());
    CHECK(*opt.x_index == 0);
    CHECK(opt.f_value == doctest::Approx(1.0));
    // Feasible recommendation at the optimum: zero gap.
    CHECK(utility_gap(0, inst, set, alpha, h) == doctest::Approx(0.0));
    // Infeasible recommendation falls to the worst-case branch.
    CHECK(utility_gap(1, inst, set, alpha, h) == doctest::Approx(0.0));
    // No recommendation: same worst-case branch, F(x*) - min F = 1 - 1 = 0.
    CHECK(utility_gap(std::nullopt, inst, set, alpha, h) == doctest::Approx(0.0));

    // Raise the infeasible design's objective floor: the penalty branch now
    // subtracts the global minimum, which is the feasible design's value.
    ProblemInstance inst2{grid, {3.0, 3.0, 1.0, 1.0}, {9.0, 9.0, 0.0, 0.0},
                          std::nullopt};
    CHECK(utility_gap(1, inst2, set, alpha, h) == doctest::Approx(2.0));
    CHECK(utility_gap(std::nullopt, inst2, set, alpha, h) == doctest::Approx(2.0));
}

TEST_CASE("epidemic instance axis orientation per case") {
    SirSettings small{};
    const std::string path = "sir_cache_case_test.txt";
    std::filesystem::remove(path);
    // Full-size table is required by make_sir_instance; use the real settings
    // but share one cache across the four cases.
    const ProblemInstance c1 = make_sir_instance(1, path);
    const ProblemInstance c2 = make_sir_instance(2, path);
    const ProblemInstance c3 = make_sir_instance(3, path);
    const ProblemInstance c4 = make_sir_instance(4, path);
    CHECK(c1.grid.n_x() == 50);
    CHECK_FALSE(c1.true_distribution.has_value());
    // Cases 1 and 2 swap which risk is objective vs constraint.
    CHECK(c1.f_at(3, 7) == c2.g_at(3, 7));
    CHECK(c1.g_at(3, 7) == c2.f_at(3, 7));
    // Cases 3 and 4 transpose the axes relative to 1 and 2.
    CHECK(c3.f_at(3, 7) == c1.f_at(7, 3));
    CHECK(c4.f_at(3, 7) == c2.f_at(7, 3));
    CHECK_THROWS(make_sir_instance(0, path));
    CHECK_THROWS(make_sir_instance(5, path));
    std::filesystem::remove(path);
}
