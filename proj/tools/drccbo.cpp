#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "drccbo/harness.hpp"
#include "drccbo/rng.hpp"
#include "gp_oracle.hpp"
#include "lp_oracle.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::optional<std::string>& out,
            const std::optional<std::size_t>& reps,
            const std::optional<std::uint64_t>& seed,
            const std::optional<std::string>& method,
            const std::optional<std::string>& setting) {
    drccbo::ExperimentConfig cfg = drccbo::load_config(config_path);
    if (out)
        cfg.out_dir = *out;
    if (reps)
        cfg.replications = *reps;
    if (seed)
        cfg.seed = *seed;
    if (method)
        cfg.method = drccbo::parse_method(*method);
    if (setting)
        cfg.setting = drccbo::parse_setting(*setting);
    cfg.validate();

    const drccbo::ProblemInstance inst = drccbo::make_instance(cfg);
    const drccbo::ReplicationResult result = drccbo::run_replications(cfg, inst);
    drccbo::emit_csv(cfg, result, cfg.out_dir);
    drccbo::emit_plot({{drccbo::method_name(cfg.method), result.curves.mean_utility_gap}},
                      cfg.out_dir);

    std::cout << "method=" << drccbo::method_name(cfg.method)
              << " setting=" << drccbo::setting_name(cfg.setting)
              << " problem=" << drccbo::problem_name(cfg.problem)
              << " reps=" << result.curves.n_reps
              << " converged=" << result.curves.n_converged
              << " no_solution=" << result.curves.n_no_solution
              << " budget=" << result.curves.n_budget << " final_mean_utility_gap="
              << drccbo::format_double(result.curves.mean_utility_gap.empty()
                                           ? 0.0
                                           : result.curves.mean_utility_gap.back())
              << '\n';
    std::cout << "wrote " << cfg.out_dir << "/summary.csv and per-replication traces\n";
    return 0;
}

int cmd_oracle_check(std::size_t instances, std::uint64_t seed) {
    drccbo::Rng rng(seed);
    double worst = 0.0;
    for (std::size_t k = 0; k < instances; ++k) {
        const std::size_t n = 2 + rng.uniform_index(9);
        std::vector<double> costs(n), ref(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            costs[i] = 20.0 * rng.uniform() - 10.0;
            ref[i] = 0.05 + rng.uniform();
            total += ref[i];
        }
        for (double& r : ref) r /= total;
        const double eps = 2.2 * rng.uniform();
        const drccbo::AmbiguitySet set(drccbo::DiscreteDistribution(ref), eps);
        const double fast = drccbo::worst_case_expectation(costs, set);
        const double lp = drccbo::oracle::wce_lp(costs, ref, eps);
        worst = std::max(worst, std::abs(fast - lp));
        if (std::abs(fast - lp) > 1e-7) {
            std::cerr << "oracle-check: mismatch on instance " << k << ": greedy="
                      << drccbo::format_double(fast)
                      << " lp=" << drccbo::format_double(lp) << '\n';
            return 2;
        }
    }
    std::cout << "oracle-check: " << instances
              << " random instances agree (max |greedy - lp| = "
              << drccbo::format_double(worst) << ")\n";

    // GP suite: incremental posterior vs a dense from-scratch solve.
    double gp_worst = 0.0;
    for (std::size_t k = 0; k < 50; ++k) {
        const drccbo::KernelParams params{0.5 + 2.0 * rng.uniform(),
                                          0.5 + 4.0 * rng.uniform(),
                                          1e-4 + 1e-2 * rng.uniform()};
        drccbo::GpPosterior gp(params);
        std::vector<drccbo::Observation> obs;
        const std::size_t t = 1 + rng.uniform_index(40);
        for (std::size_t i = 0; i < t; ++i) {
            const drccbo::Observation o{10.0 * rng.uniform() - 5.0,
                                        10.0 * rng.uniform() - 5.0, rng.normal()};
            obs.push_back(o);
            gp = gp.add_observation(o.x, o.w, o.y);
        }
        for (std::size_t q = 0; q < 10; ++q) {
            const drccbo::Point p{10.0 * rng.uniform() - 5.0,
                                  10.0 * rng.uniform() - 5.0};
            const auto fast = gp.posterior_at(p);
            const auto dense = drccbo::oracle::dense_posterior(params, obs, p);
            const double err = std::max(std::abs(fast.mean - dense.mean),
                                        std::abs(fast.variance - dense.variance));
            gp_worst = std::max(gp_worst, err);
            if (err > 1e-7) {
                std::cerr << "oracle-check: gp mismatch on state " << k << '\n';
                return 2;
            }
        }
    }
    std::cout << "oracle-check: 50 incremental GP states match dense solves "
                 "(max error = "
              << drccbo::format_double(gp_worst) << ")\n";
    return 0;
}

int cmd_precompute_sir(const std::string& out_path) {
    const drccbo::SirSettings settings{};
    const std::vector<double> table = drccbo::sir_peak_table(settings, out_path);
    std::cout << "precompute-sir: wrote " << table.size() << " peak values to "
              << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributionally robust chance-constrained optimization on grids"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out, method, setting;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    CLI::App* run = app.add_subcommand("run", "run one experiment from a JSON config");
    run->add_option("--config", config_path, "path to the JSON config")->required();
    run->add_option("--out", out, "override the output directory");
    run->add_option("--reps", reps, "override the replication count");
    run->add_option("--seed", seed, "override the base seed");
    run->add_option("--method", method, "override the selection method");
    run->add_option("--setting", setting, "override the environment setting");

    std::size_t oracle_instances = 1000;
    std::uint64_t oracle_seed = 7;
    CLI::App* oracle = app.add_subcommand(
        "oracle-check", "cross-check the greedy worst-case expectation against an LP");
    oracle->add_option("--instances", oracle_instances, "number of random instances");
    oracle->add_option("--seed", oracle_seed, "random seed");

    std::string sir_out = "sir_cache.txt";
    CLI::App* sir = app.add_subcommand("precompute-sir",
                                       "precompute the epidemic peak table cache");
    sir->add_option("--out", sir_out, "cache file path")->required();

    try {
        app.parse(argc, argv);
        if (run->parsed())
            return cmd_run(config_path, out, reps, seed, method, setting);
        if (oracle->parsed())
            return cmd_oracle_check(oracle_instances, oracle_seed);
        if (sir->parsed())
            return cmd_precompute_sir(sir_out);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        const std::string what = e.what();
        std::cerr << "error: " << what << '\n';
        // Configuration problems exit 1; runtime failures exit 2.
        return what.rfind("config:", 0) == 0 ? 1 : 2;
    }
}
