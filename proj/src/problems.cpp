#include "drccbo/problems.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace drccbo {

double synthetic_f(double x, double w) {
    auto bumps = [](double v) {
        return std::exp(-v * v / 4.0) + 0.6 * std::exp(-(v - 8.0) * (v - 8.0) / 3.0) +
               0.3 * std::exp(-(v + 9.0) * (v + 9.0) / 5.0);
    };
    return bumps(x) + bumps(w);
}

double synthetic_g(double x, double w) {
    // Grouped so the evaluation is exactly symmetric under swapping x and w.
    return 0.26 * (x * x + w * w) - 0.48 * (x * w);
}

DiscreteDistribution true_mixture_distribution(const std::vector<double>& w_values) {
    if (w_values.empty())
        throw std::invalid_argument("true_mixture_distribution: empty grid");
    std::vector<double> weights(w_values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < w_values.size(); ++i) {
        const double w = w_values[i];
        const double d1 = std::exp(-(w + 5.0) * (w + 5.0) / 20.0);
        const double d2 = std::exp(-(w - 5.0) * (w - 5.0) / 20.0);
        weights[i] = 0.5 * d1 + 0.5 * d2;  // common density factor cancels
        sum += weights[i];
    }
    for (double& v : weights) v /= sum;
    return DiscreteDistribution(std::move(weights));
}

ProblemInstance make_synthetic_instance(bool with_true_distribution) {
    GridSpace grid(make_grid(-10.0, 10.0, 50), make_grid(-10.0, 10.0, 50));
    std::vector<double> f(grid.size()), g(grid.size());
    for (std::size_t xi = 0; xi < grid.n_x(); ++xi)
        for (std::size_t wi = 0; wi < grid.n_w(); ++wi) {
            const Point q = grid.point(xi, wi);
            f[grid.flat(xi, wi)] = synthetic_f(q.x, q.w);
            g[grid.flat(xi, wi)] = synthetic_g(q.x, q.w);
        }
    std::optional<DiscreteDistribution> dist;
    if (with_true_distribution)
        dist = true_mixture_distribution(grid.w_values());
    return {std::move(grid), std::move(f), std::move(g), std::move(dist)};
}

double sir_simulate(double beta_contact, double gamma_isolation,
                    const SirSettings& cfg) {
    const auto steps = static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
    const double n = cfg.s0 + cfg.i0 + cfg.r0;
    double s = cfg.s0, i = cfg.i0, r = cfg.r0;
    double peak = i;
    for (std::size_t k = 0; k < steps; ++k) {
        const double infections = beta_contact * i * s / n * cfg.dt;
        const double removals = gamma_isolation * i * cfg.dt;
        s -= infections;
        i += infections - removals;
        r += removals;
        peak = std::max(peak, i);
    }
    return peak;
}

namespace {

std::string sir_cache_header(const SirSettings& c) {
    std::ostringstream os;
    os << "# sir_peak_table lo=" << c.grid_lo << " hi=" << c.grid_hi
       << " n=" << c.grid_n << " dt=" << c.dt << " t_max=" << c.t_max
       << " s0=" << c.s0 << " i0=" << c.i0 << " r0=" << c.r0;
    return os.str();
}

std::vector<double> compute_sir_table(const SirSettings& cfg) {
    const std::vector<double> axis = make_grid(cfg.grid_lo, cfg.grid_hi, cfg.grid_n);
    std::vector<double> table(cfg.grid_n * cfg.grid_n);
    for (std::size_t bi = 0; bi < cfg.grid_n; ++bi)
        for (std::size_t gi = 0; gi < cfg.grid_n; ++gi)
            table[bi * cfg.grid_n + gi] = sir_simulate(axis[bi], axis[gi], cfg);
    return table;
}

}  // namespace

std::vector<double> sir_peak_table(const SirSettings& cfg,
                                   const std::string& cache_path) {
    const std::string header = sir_cache_header(cfg);
    if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
        std::ifstream in(cache_path);
        std::string first;
        if (std::getline(in, first) && first == header) {
            std::vector<double> table;
            table.reserve(cfg.grid_n * cfg.grid_n);
            double v;
            while (in >> v) table.push_back(v);
            if (table.size() == cfg.grid_n * cfg.grid_n)
                return table;
        }
    }
    std::vector<double> table = compute_sir_table(cfg);
    if (!cache_path.empty()) {
        std::ofstream out(cache_path);
        if (!out)
            throw std::runtime_error("sir_peak_table: cannot write " + cache_path);
        out << header << "\n";
        out.precision(17);
        for (double v : table) out << v << "\n";
    }
    return table;
}

RiskTables risk_functions(const GridSpace& grid, const std::vector<double>& peak) {
    if (peak.size() != grid.size())
        throw std::invalid_argument("risk_functions: table shape mismatch");
    RiskTables out;
    out.r1.resize(peak.size());
    out.r2 = peak;
    // Unshifted R1 on the (beta, gamma) grid, beta on the first axis.
    for (std::size_t bi = 0; bi < grid.n_x(); ++bi)
        for (std::size_t gi = 0; gi < grid.n_w(); ++gi) {
            const std::size_t idx = grid.flat(bi, gi);
            out.r1[idx] = peak[idx] - 450.0 * grid.x_value(bi) + 800.0 * grid.w_value(gi);
        }
    auto shift = [](std::vector<double>& t) {
        const auto [mn, mx] = std::minmax_element(t.begin(), t.end());
        const double c = (*mx + *mn) / 2.0;
        for (double& v : t) v -= c;
        return c;
    };
    out.c1 = shift(out.r1);
    out.c2 = shift(out.r2);
    return out;
}

ProblemInstance make_sir_instance(int case_id, const std::string& cache_path) {
    if (case_id < 1 || case_id > 4)
        throw std::invalid_argument("make_sir_instance: case must be 1..4");
    const SirSettings cfg{};
    const std::vector<double> axis = make_grid(cfg.grid_lo, cfg.grid_hi, cfg.grid_n);
    GridSpace grid(axis, axis);
    const std::vector<double> peak = sir_peak_table(cfg, cache_path);
    const RiskTables risks = risk_functions(grid, peak);

    // Cases 1-2: x = beta (the peak-table row axis); cases 3-4: x = gamma, so
    // the tables are transposed into (x, w) order.
    const bool x_is_beta = case_id <= 2;
    const bool f_is_r1 = (case_id == 1 || case_id == 3);
    std::vector<double> f(grid.size()), g(grid.size());
    for (std::size_t xi = 0; xi < grid.n_x(); ++xi)
        for (std::size_t wi = 0; wi < grid.n_w(); ++wi) {
            const std::size_t src =
                x_is_beta ? grid.flat(xi, wi) : grid.flat(wi, xi);
            const double r1 = -risks.r1[src];
            const double r2 = -risks.r2[src];
            f[grid.flat(xi, wi)] = f_is_r1 ? r1 : r2;
            g[grid.flat(xi, wi)] = f_is_r1 ? r2 : r1;
        }
    return {std::move(grid), std::move(f), std::move(g), std::nullopt};
}

double true_f_value(const ProblemInstance& inst, std::size_t x_index,
                    const AmbiguitySet& set) {
    const std::size_t nw = inst.grid.n_w();
    std::vector<double> costs(nw);
    for (std::size_t wi = 0; wi < nw; ++wi) costs[wi] = inst.f_at(x_index, wi);
    return worst_case_expectation(costs, set);
}

double true_g_value(const ProblemInstance& inst, std::size_t x_index, double h,
                    const AmbiguitySet& set) {
    const std::size_t nw = inst.grid.n_w();
    std::vector<double> costs(nw);
    for (std::size_t wi = 0; wi < nw; ++wi)
        costs[wi] = inst.g_at(x_index, wi) > h ? 1.0 : 0.0;
    return worst_case_expectation(costs, set);
}

ExactOptimum exact_optimum(const ProblemInstance& inst, const AmbiguitySet& set,
                           double alpha, double h) {
    std::optional<std::size_t> best;
    double best_f = -std::numeric_limits<double>::infinity();
    double min_f = std::numeric_limits<double>::infinity();
    for (std::size_t xi = 0; xi < inst.grid.n_x(); ++xi) {
        const double fv = true_f_value(inst, xi, set);
        min_f = std::min(min_f, fv);
        if (true_g_value(inst, xi, h, set) > alpha && fv > best_f) {
            best_f = fv;
            best = xi;
        }
    }
    if (!best)
        return {std::nullopt, min_f};
    return {best, best_f};
}

double utility_gap(std::optional<std::size_t> recommendation,
                   const ProblemInstance& inst, const AmbiguitySet& set, double alpha,
                   double h) {
    const ExactOptimum opt = exact_optimum(inst, set, alpha, h);
    if (recommendation &&
        true_g_value(inst, *recommendation, h, set) > alpha)
        return opt.f_value - true_f_value(inst, *recommendation, set);
    double min_f = std::numeric_limits<double>::infinity();
    for (std::size_t xi = 0; xi < inst.grid.n_x(); ++xi)
        min_f = std::min(min_f, true_f_value(inst, xi, set));
    return opt.f_value - min_f;
}

}  // namespace drccbo
