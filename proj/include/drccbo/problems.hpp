#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "drccbo/ambiguity.hpp"
#include "drccbo/grid.hpp"

namespace drccbo {

/// Benchmark problem: grid plus true objective/constraint tables (flat
/// indexing xi * n_w + wi) and, in uncontrollable settings, the true
/// environment distribution.
struct ProblemInstance {
    GridSpace grid;
    std::vector<double> f_table;
    std::vector<double> g_table;
    std::optional<DiscreteDistribution> true_distribution;

    double f_at(std::size_t xi, std::size_t wi) const {
        return f_table[grid.flat(xi, wi)];
    }
    double g_at(std::size_t xi, std::size_t wi) const {
        return g_table[grid.flat(xi, wi)];
    }
};

// ---- synthetic benchmark ----

double synthetic_f(double x, double w);
double synthetic_g(double x, double w);

/// 50x50 grid over [-10,10]^2 with the synthetic f and g.
ProblemInstance make_synthetic_instance(bool with_true_distribution);

/// Normalized mixture 0.5 N(-5,10) + 0.5 N(5,10) evaluated on the grid.
DiscreteDistribution true_mixture_distribution(const std::vector<double>& w_values);

// ---- SIR benchmark ----

struct SirSettings {
    double t_max = 15.0;
    double dt = 0.005;
    double s0 = 990.0;
    double i0 = 10.0;
    double r0 = 0.0;
    double grid_lo = 0.01;
    double grid_hi = 0.5;
    std::size_t grid_n = 50;
};

/// Forward-Euler integration; returns the peak infected count over the
/// time grid {0, dt, ..., t_max}.
double sir_simulate(double beta_contact, double gamma_isolation,
                    const SirSettings& settings = {});

/// 50x50 table of peak infections over the (beta, gamma) grid. Reads the
/// cache file when its header matches the settings, regenerates otherwise.
std::vector<double> sir_peak_table(const SirSettings& settings,
                                   const std::string& cache_path);

struct RiskTables {
    std::vector<double> r1;  // economic risk, shifted so max = -min
    std::vector<double> r2;  // peak infections, shifted so max = -min
    double c1;
    double c2;
};

RiskTables risk_functions(const GridSpace& grid, const std::vector<double>& peak_table);

/// SIR cases 1-4; case1/2 use x=beta, case3/4 use x=gamma.
ProblemInstance make_sir_instance(int case_id, const std::string& cache_path);

// ---- exact reference quantities ----

/// True DR expectation F(x) over the true table.
double true_f_value(const ProblemInstance& inst, std::size_t x_index,
                    const AmbiguitySet& set);
/// True DR probability G(x) over the true table.
double true_g_value(const ProblemInstance& inst, std::size_t x_index, double h,
                    const AmbiguitySet& set);

struct ExactOptimum {
    std::optional<std::size_t> x_index;  // nullopt when no design is feasible
    double f_value;                      // F at the optimum, or min F when infeasible
};

ExactOptimum exact_optimum(const ProblemInstance& inst, const AmbiguitySet& set,
                           double alpha, double h);

/// Utility gap of the current recommendation. recommendation is the argmax
/// of l^F over H when H is nonempty.
double utility_gap(std::optional<std::size_t> recommendation,
                   const ProblemInstance& inst, const AmbiguitySet& set, double alpha,
                   double h);

}  // namespace drccbo
