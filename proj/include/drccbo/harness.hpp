#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drccbo/baselines.hpp"
#include "drccbo/core.hpp"
#include "drccbo/kernel.hpp"
#include "drccbo/problems.hpp"

namespace drccbo {

enum class Method { Proposed, Random, Us, Drbo, Drptr, Ccbo };
enum class Problem { Synthetic, SirCase1, SirCase2, SirCase3, SirCase4 };
enum class SettingMode { Simulator, Fixed, DataDriven };
enum class EtaMode { Zero, Theoretical };

struct BetaMode {
    bool theoretical = false;
    double beta_sqrt_f = 3.0;  // used in fixed mode
    double beta_sqrt_g = 2.0;
};

struct EpsilonMode {
    bool schedule = false;
    double value = 0.15;  // used in fixed mode
};

struct ExperimentConfig {
    Problem problem = Problem::Synthetic;
    SettingMode setting = SettingMode::Simulator;
    Method method = Method::Proposed;
    KernelParams kernel_f{1.0, 3.0, 1e-8};
    KernelParams kernel_g{2500.0, 4.0, 1e-4};
    double h = 5.0;
    double alpha = 0.53;
    double xi = 1e-12;
    double delta = 0.1;
    EtaMode eta_mode = EtaMode::Zero;
    BetaMode beta_mode{};
    EpsilonMode epsilon_mode{};
    std::size_t iterations = 300;
    std::size_t replications = 100;
    std::uint64_t seed = 0;
    std::string out_dir = "results";
    std::string sir_cache = "sir_cache.txt";
    BaselineConfig baselines{};

    void validate() const;
};

const char* method_name(Method m);
const char* setting_name(SettingMode s);
const char* problem_name(Problem p);

Method parse_method(const std::string& s);
SettingMode parse_setting(const std::string& s);
Problem parse_problem(const std::string& s);

/// Strict JSON loader: every key must be known, required keys must be present.
ExperimentConfig load_config(const std::string& path);

struct TraceRow {
    std::size_t t;
    std::ptrdiff_t x_index;  // -1 on a terminal row without a selection
    std::ptrdiff_t w_index;
    double y_f, y_g;
    std::size_t n_h, n_l, n_m;
    double c_best;
    std::ptrdiff_t recommend_index;  // -1 when H_t is empty
    double utility_gap;
    StopKind status;
};

struct RunTrace {
    std::vector<TraceRow> rows;
    StopKind final_status = StopKind::Continue;
};

RunTrace run_algorithm1(const ExperimentConfig& config, const ProblemInstance& inst,
                        std::uint64_t seed);

struct AggregatedCurves {
    std::vector<double> mean_utility_gap;  // one entry per iteration
    std::size_t n_reps = 0;
    std::size_t n_converged = 0;
    std::size_t n_no_solution = 0;
    std::size_t n_budget = 0;
};

struct ReplicationResult {
    AggregatedCurves curves;
    std::vector<RunTrace> traces;
};

ReplicationResult run_replications(const ExperimentConfig& config,
                                   const ProblemInstance& inst);

void emit_csv(const ExperimentConfig& config, const ReplicationResult& result,
              const std::string& out_dir);

struct LabeledCurve {
    std::string label;
    std::vector<double> values;
};

void emit_plot(const std::vector<LabeledCurve>& curves, const std::string& out_dir);

/// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

ProblemInstance make_instance(const ExperimentConfig& config);

}  // namespace drccbo
