#include "drccbo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <json.hpp>
#include <stdexcept>
#include <thread>

namespace drccbo {

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace

void ExperimentConfig::validate() const {
    kernel_f.validate();
    kernel_g.validate();
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("config: alpha must be in (0,1)");
    if (!(xi > 0.0))
        throw ConfigError("config: xi must be positive");
    if (!(delta > 0.0 && delta < 1.0))
        throw ConfigError("config: delta must be in (0,1)");
    if (iterations < 1)
        throw ConfigError("config: iterations must be >= 1");
    if (replications < 1)
        throw ConfigError("config: replications must be >= 1");
    if (!epsilon_mode.schedule && !(epsilon_mode.value >= 0.0))
        throw ConfigError("config: epsilon value must be nonnegative");
    if (!beta_mode.theoretical &&
        (!(beta_mode.beta_sqrt_f >= 0.0) || !(beta_mode.beta_sqrt_g >= 0.0)))
        throw ConfigError("config: fixed beta roots must be nonnegative");
    if (baselines.ccbo_mc_samples < 1)
        throw ConfigError("config: ccbo_mc_samples must be >= 1");
    if (!(baselines.drptr_gamma >= 0.0))
        throw ConfigError("config: drptr_gamma must be nonnegative");
}

const char* method_name(Method m) {
    switch (m) {
        case Method::Proposed: return "proposed";
        case Method::Random: return "random";
        case Method::Us: return "us";
        case Method::Drbo: return "drbo";
        case Method::Drptr: return "drptr";
        case Method::Ccbo: return "ccbo";
    }
    return "?";
}

const char* setting_name(SettingMode s) {
    switch (s) {
        case SettingMode::Simulator: return "simulator";
        case SettingMode::Fixed: return "fixed";
        case SettingMode::DataDriven: return "data-driven";
    }
    return "?";
}

const char* problem_name(Problem p) {
    switch (p) {
        case Problem::Synthetic: return "synthetic";
        case Problem::SirCase1: return "sir-case1";
        case Problem::SirCase2: return "sir-case2";
        case Problem::SirCase3: return "sir-case3";
        case Problem::SirCase4: return "sir-case4";
    }
    return "?";
}

Method parse_method(const std::string& s) {
    if (s == "proposed") return Method::Proposed;
    if (s == "random") return Method::Random;
    if (s == "us") return Method::Us;
    if (s == "drbo") return Method::Drbo;
    if (s == "drptr") return Method::Drptr;
    if (s == "ccbo") return Method::Ccbo;
    throw ConfigError("config: unknown method '" + s + "'");
}

SettingMode parse_setting(const std::string& s) {
    if (s == "simulator") return SettingMode::Simulator;
    if (s == "fixed") return SettingMode::Fixed;
    if (s == "data-driven") return SettingMode::DataDriven;
    throw ConfigError("config: unknown setting '" + s + "'");
}

Problem parse_problem(const std::string& s) {
    if (s == "synthetic") return Problem::Synthetic;
    if (s == "sir-case1") return Problem::SirCase1;
    if (s == "sir-case2") return Problem::SirCase2;
    if (s == "sir-case3") return Problem::SirCase3;
    if (s == "sir-case4") return Problem::SirCase4;
    throw ConfigError("config: unknown problem '" + s + "'");
}

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string& key = it.key();
        const bool known =
            std::find(required.begin(), required.end(), key) != required.end() ||
            std::find(optional.begin(), optional.end(), key) != optional.end();
        if (!known)
            throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
    for (const std::string& key : required)
        if (!obj.contains(key))
            throw ConfigError("config: missing key '" + key + "' in " + where);
}

KernelParams parse_kernel(const json& obj, const std::string& where) {
    require_keys(obj, {"signal_variance", "length_scale", "noise_variance"}, {}, where);
    return {obj.at("signal_variance").get<double>(),
            obj.at("length_scale").get<double>(),
            obj.at("noise_variance").get<double>()};
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    require_keys(doc,
                 {"problem", "setting", "method", "kernel_f", "kernel_g", "h", "alpha",
                  "xi", "delta", "eta_mode", "beta_mode", "epsilon_mode", "iterations",
                  "replications", "seed"},
                 {"out_dir", "sir_cache", "drptr_gamma", "ccbo_mc_samples"}, "config");
    ExperimentConfig cfg;
    cfg.problem = parse_problem(doc.at("problem").get<std::string>());
    cfg.setting = parse_setting(doc.at("setting").get<std::string>());
    cfg.method = parse_method(doc.at("method").get<std::string>());
    cfg.kernel_f = parse_kernel(doc.at("kernel_f"), "kernel_f");
    cfg.kernel_g = parse_kernel(doc.at("kernel_g"), "kernel_g");
    cfg.h = doc.at("h").get<double>();
    cfg.alpha = doc.at("alpha").get<double>();
    cfg.xi = doc.at("xi").get<double>();
    cfg.delta = doc.at("delta").get<double>();
    {
        const std::string mode = doc.at("eta_mode").get<std::string>();
        if (mode == "zero")
            cfg.eta_mode = EtaMode::Zero;
        else if (mode == "theoretical")
            cfg.eta_mode = EtaMode::Theoretical;
        else
            throw ConfigError("config: eta_mode must be 'zero' or 'theoretical'");
    }
    {
        const json& bm = doc.at("beta_mode");
        const std::string mode = bm.at("mode").get<std::string>();
        if (mode == "theoretical") {
            require_keys(bm, {"mode"}, {}, "beta_mode");
            cfg.beta_mode.theoretical = true;
        } else if (mode == "fixed") {
            require_keys(bm, {"mode", "beta_sqrt_f", "beta_sqrt_g"}, {}, "beta_mode");
            cfg.beta_mode.theoretical = false;
            cfg.beta_mode.beta_sqrt_f = bm.at("beta_sqrt_f").get<double>();
            cfg.beta_mode.beta_sqrt_g = bm.at("beta_sqrt_g").get<double>();
        } else {
            throw ConfigError("config: beta_mode.mode must be 'theoretical' or 'fixed'");
        }
    }
    {
        const json& em = doc.at("epsilon_mode");
        const std::string mode = em.at("mode").get<std::string>();
        if (mode == "schedule") {
            require_keys(em, {"mode"}, {}, "epsilon_mode");
            cfg.epsilon_mode.schedule = true;
        } else if (mode == "fixed") {
            require_keys(em, {"mode", "value"}, {}, "epsilon_mode");
            cfg.epsilon_mode.schedule = false;
            cfg.epsilon_mode.value = em.at("value").get<double>();
        } else {
            throw ConfigError("config: epsilon_mode.mode must be 'fixed' or 'schedule'");
        }
    }
    cfg.iterations = doc.at("iterations").get<std::size_t>();
    cfg.replications = doc.at("replications").get<std::size_t>();
    cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("out_dir"))
        cfg.out_dir = doc.at("out_dir").get<std::string>();
    if (doc.contains("sir_cache"))
        cfg.sir_cache = doc.at("sir_cache").get<std::string>();
    if (doc.contains("drptr_gamma"))
        cfg.baselines.drptr_gamma = doc.at("drptr_gamma").get<double>();
    if (doc.contains("ccbo_mc_samples"))
        cfg.baselines.ccbo_mc_samples = doc.at("ccbo_mc_samples").get<std::size_t>();
    cfg.validate();
    return cfg;
}

ProblemInstance make_instance(const ExperimentConfig& config) {
    switch (config.problem) {
        case Problem::Synthetic:
            return make_synthetic_instance(config.setting != SettingMode::Simulator);
        case Problem::SirCase1:
            return make_sir_instance(1, config.sir_cache);
        case Problem::SirCase2:
            return make_sir_instance(2, config.sir_cache);
        case Problem::SirCase3:
            return make_sir_instance(3, config.sir_cache);
        case Problem::SirCase4:
            return make_sir_instance(4, config.sir_cache);
    }
    throw ConfigError("config: unknown problem");
}

RunTrace run_algorithm1(const ExperimentConfig& config, const ProblemInstance& inst,
                        std::uint64_t seed) {
    config.validate();
    const GridSpace& grid = inst.grid;
    const bool uncontrollable = config.setting != SettingMode::Simulator;
    if (uncontrollable && !inst.true_distribution)
        throw ConfigError("config: uncontrollable setting needs a true distribution");

    // The environment stream (true-distribution draws, observation noise) is
    // separate from the policy stream so selection methods cannot shift it.
    Rng env_rng(seed);
    Rng policy_rng(seed ^ 0x9E3779B97F4A7C15ULL);

    const double eta =
        config.eta_mode == EtaMode::Zero
            ? 0.0
            : eta_parameter(config.xi, config.delta,
                            std::sqrt(prior_variance_min(config.kernel_g, grid)),
                            grid.size());
    const double noise_sd_f = std::sqrt(config.kernel_f.noise_variance);
    const double noise_sd_g = std::sqrt(config.kernel_g.noise_variance);

    GpPosterior gp_f(config.kernel_f);
    GpPosterior gp_g(config.kernel_g);
    GridPosteriorCache cache_f(grid);
    GridPosteriorCache cache_g(grid);
    std::vector<std::size_t> observed_w;

    auto observe = [&](std::size_t xi, std::size_t wi) {
        const Point q = grid.point(xi, wi);
        const double yf = inst.f_at(xi, wi) + env_rng.normal(0.0, noise_sd_f);
        const double yg = inst.g_at(xi, wi) + env_rng.normal(0.0, noise_sd_g);
        gp_f = gp_f.add_observation(q.x, q.w, yf);
        gp_g = gp_g.add_observation(q.x, q.w, yg);
        observed_w.push_back(wi);
        return std::pair{yf, yg};
    };

    // One random initial point; in uncontrollable settings the environment is
    // never choosable, so the initial w also comes from the true distribution.
    {
        const std::size_t xi = env_rng.uniform_index(grid.n_x());
        const std::size_t wi =
            uncontrollable ? env_rng.discrete(inst.true_distribution->weights())
                           : env_rng.uniform_index(grid.n_w());
        observe(xi, wi);
    }

    RunTrace trace;
    for (std::size_t t = 1; t <= config.iterations; ++t) {
        cache_f.sync(gp_f);
        cache_g.sync(gp_g);

        DiscreteDistribution reference =
            config.setting == SettingMode::DataDriven
                ? empirical_reference(observed_w, grid)
                : DiscreteDistribution::uniform(grid.n_w());
        const double eps = config.epsilon_mode.schedule
                               ? epsilon_schedule(t, grid.n_w(), config.delta)
                               : config.epsilon_mode.value;
        const AmbiguitySet set(std::move(reference), eps);

        const double beta_f =
            config.beta_mode.theoretical
                ? beta_schedule(t, grid.size(), config.delta)
                : config.beta_mode.beta_sqrt_f * config.beta_mode.beta_sqrt_f;
        const double beta_g =
            config.beta_mode.theoretical
                ? beta_schedule(t, grid.size(), config.delta)
                : config.beta_mode.beta_sqrt_g * config.beta_mode.beta_sqrt_g;

        const BoundsTable table =
            compute_bounds_table(grid, cache_f, cache_g, beta_f, beta_g, config.h, eta,
                                 config.alpha, config.xi, set);

        std::optional<std::size_t> recommendation;
        for (std::size_t xi = 0; xi < table.size(); ++xi)
            if (table.rows[xi].label == Label::H &&
                (!recommendation || table.rows[xi].lf > table.rows[*recommendation].lf))
                recommendation = xi;

        const double cbest = current_best(table);
        const double ug = utility_gap(recommendation, inst, set, config.alpha, config.h);
        const StopStatus status = stopping(table, config.xi);

        TraceRow row{};
        row.t = t;
        row.n_h = table.count(Label::H);
        row.n_l = table.count(Label::L);
        row.n_m = table.count(Label::M);
        row.c_best = cbest;
        row.recommend_index =
            recommendation ? static_cast<std::ptrdiff_t>(*recommendation) : -1;
        row.utility_gap = ug;
        row.status = status.kind;

        if (status.kind != StopKind::Continue) {
            row.x_index = -1;
            row.w_index = -1;
            row.y_f = std::numeric_limits<double>::quiet_NaN();
            row.y_g = std::numeric_limits<double>::quiet_NaN();
            trace.rows.push_back(row);
            trace.final_status = status.kind;
            return trace;
        }

        Selection sel{};
        const Setting policy_setting =
            uncontrollable ? Setting::Uncontrollable : Setting::Simulator;
        const DiscreteDistribution empirical =
            empirical_reference(observed_w, grid);
        switch (config.method) {
            case Method::Proposed: {
                std::vector<double> acq(table.size());
                for (std::size_t xi = 0; xi < table.size(); ++xi)
                    acq[xi] = table.rows[xi].label == Label::L
                                  ? 0.0
                                  : acquisition(xi, table, cbest, config.alpha,
                                                config.xi);
                sel.x_index = select_x(table, acq);
                if (!uncontrollable)
                    sel.w_index = select_w_simulator(grid, sel.x_index, cache_f, cache_g);
                break;
            }
            case Method::Random:
                sel = random_select(grid, policy_rng, policy_setting);
                break;
            case Method::Us:
                sel = us_select(grid, cache_f, cache_g, policy_setting, &empirical);
                break;
            case Method::Drbo:
                sel = drbo_select(grid, table, cache_f);
                break;
            case Method::Drptr:
                sel = drptr_select(grid, gp_g, cache_g, table, set, beta_g, config.h,
                                   eta, config.alpha, config.baselines, policy_setting,
                                   &empirical);
                break;
            case Method::Ccbo:
                sel = ccbo_select(grid, gp_f, gp_g, cache_f, cache_g, set.reference,
                                  config.alpha, config.h, config.baselines, policy_rng);
                break;
        }

        const std::size_t wi =
            uncontrollable ? env_rng.discrete(inst.true_distribution->weights())
                           : sel.w_index.value();
        const auto [yf, yg] = observe(sel.x_index, wi);
        row.x_index = static_cast<std::ptrdiff_t>(sel.x_index);
        row.w_index = static_cast<std::ptrdiff_t>(wi);
        row.y_f = yf;
        row.y_g = yg;
        trace.rows.push_back(row);
    }
    trace.final_status = StopKind::Continue;
    return trace;
}

ReplicationResult run_replications(const ExperimentConfig& config,
                                   const ProblemInstance& inst) {
    ReplicationResult result;
    const std::size_t reps = config.replications;
    result.traces.resize(reps);

    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> pending;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= reps)
                return;
            try {
                result.traces[rep] =
                    run_algorithm1(config, inst, config.seed + rep);
            } catch (const std::exception& e) {
                throw std::runtime_error("replication " + std::to_string(rep) + ": " +
                                         e.what());
            }
        }
    };
    if (workers <= 1 || reps <= 1) {
        worker();
    } else {
        for (unsigned i = 0; i < std::min<std::size_t>(workers, reps); ++i)
            pending.push_back(std::async(std::launch::async, worker));
        for (auto& f : pending) f.get();  // fail-fast: first exception aborts
    }

    AggregatedCurves& agg = result.curves;
    agg.n_reps = reps;
    agg.mean_utility_gap.assign(config.iterations, 0.0);
    for (const RunTrace& trace : result.traces) {
        double last = 0.0;
        for (std::size_t t = 0; t < config.iterations; ++t) {
            if (t < trace.rows.size())
                last = trace.rows[t].utility_gap;
            agg.mean_utility_gap[t] += last;
        }
        switch (trace.final_status) {
            case StopKind::Converged: ++agg.n_converged; break;
            case StopKind::NoSolution: ++agg.n_no_solution; break;
            case StopKind::Continue: ++agg.n_budget; break;
        }
    }
    for (double& v : agg.mean_utility_gap) v /= static_cast<double>(reps);
    return result;
}

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

const char* status_name(StopKind k) {
    switch (k) {
        case StopKind::Continue: return "continue";
        case StopKind::NoSolution: return "no_solution";
        case StopKind::Converged: return "converged";
    }
    return "?";
}

}  // namespace

void emit_csv(const ExperimentConfig& config, const ReplicationResult& result,
              const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir + "/summary.csv", std::ios::binary);
        if (!out)
            throw std::runtime_error("emit_csv: cannot write summary.csv");
        out << "# replications that stopped early hold their final utility gap for "
               "the remaining iterations\n";
        out << "method,setting,problem,iteration,mean_utility_gap,n_reps\n";
        for (std::size_t t = 0; t < result.curves.mean_utility_gap.size(); ++t)
            out << method_name(config.method) << ',' << setting_name(config.setting)
                << ',' << problem_name(config.problem) << ',' << (t + 1) << ','
                << format_double(result.curves.mean_utility_gap[t]) << ','
                << result.curves.n_reps << '\n';
    }
    for (std::size_t rep = 0; rep < result.traces.size(); ++rep) {
        std::ofstream out(out_dir + "/trace_" + std::to_string(rep) + ".csv",
                          std::ios::binary);
        if (!out)
            throw std::runtime_error("emit_csv: cannot write trace file");
        out << "t,x_index,w_index,y_f,y_g,n_H,n_L,n_M,c_best,recommend_index,"
               "utility_gap,status\n";
        for (const TraceRow& r : result.traces[rep].rows)
            out << r.t << ',' << r.x_index << ',' << r.w_index << ','
                << format_double(r.y_f) << ',' << format_double(r.y_g) << ',' << r.n_h
                << ',' << r.n_l << ',' << r.n_m << ',' << format_double(r.c_best) << ','
                << r.recommend_index << ',' << format_double(r.utility_gap) << ','
                << status_name(r.status) << '\n';
    }
}

void emit_plot(const std::vector<LabeledCurve>& curves, const std::string& out_dir) {
    if (curves.empty())
        throw std::invalid_argument("emit_plot: no curves");
    std::filesystem::create_directories(out_dir);

    const double width = 800, height = 500;
    const double ml = 70, mr = 160, mt = 20, mb = 50;
    std::size_t n_iter = 0;
    bool log_ok = true;
    double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
    for (const LabeledCurve& c : curves) {
        n_iter = std::max(n_iter, c.values.size());
        for (double v : c.values) {
            if (!(v > 0.0))
                log_ok = false;
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    if (n_iter == 0)
        throw std::invalid_argument("emit_plot: empty curves");
    if (vmax <= vmin)
        vmax = vmin + 1.0;

    auto ylog = [&](double v) { return std::log10(v); };
    const double ylo = log_ok ? ylog(vmin) : vmin;
    const double yhi = log_ok ? ylog(vmax) : vmax;
    auto to_xy = [&](std::size_t i, double v) {
        const double fx =
            n_iter > 1 ? static_cast<double>(i) / static_cast<double>(n_iter - 1) : 0.5;
        const double vv = log_ok ? ylog(v) : v;
        const double fy = yhi > ylo ? (vv - ylo) / (yhi - ylo) : 0.5;
        return std::pair{ml + fx * (width - ml - mr),
                         height - mb - fy * (height - mt - mb)};
    };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};
    std::ofstream out(out_dir + "/utility_gap.svg", std::ios::binary);
    if (!out)
        throw std::runtime_error("emit_plot: cannot write utility_gap.svg");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
        << width - mr << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (ml + (width - ml - mr) / 2) << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"14\">iteration</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + (height - mt - mb) / 2)
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
        << (mt + (height - mt - mb) / 2) << ")\">mean utility gap"
        << (log_ok ? " (log scale)" : "") << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << height - mb
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(vmin)
        << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 10
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(vmax)
        << "</text>\n";
    out << "<text x=\"" << ml << "\" y=\"" << height - mb + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">1</text>\n";
    out << "<text x=\"" << width - mr << "\" y=\"" << height - mb + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << n_iter << "</text>\n";

    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const LabeledCurve& c = curves[ci];
        const char* color = palette[ci % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < c.values.size(); ++i) {
            const auto [x, y] = to_xy(i, c.values[i]);
            out << x << ',' << y << ' ';
        }
        out << "\"/>\n";
        const double ly = mt + 16 + 18 * static_cast<double>(ci);
        out << "<line x1=\"" << width - mr + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
            << width - mr + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - mr + 40 << "\" y=\"" << ly
            << "\" font-size=\"12\">" << c.label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace drccbo
