#include "drccbo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace drccbo {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

double normal_pdf(double z) {
    return 0.39894228040143267794 * std::exp(-0.5 * z * z);
}

}  // namespace

double gaussian_expected_improvement(double mean, double variance, double c) {
    const double sigma = std::sqrt(std::max(variance, 0.0));
    if (sigma == 0.0)
        return std::max(mean - c, 0.0);
    const double z = (mean - c) / sigma;
    return (mean - c) * normal_cdf(z) + sigma * normal_pdf(z);
}

Selection random_select(const GridSpace& grid, Rng& rng, Setting setting) {
    const std::size_t xi = rng.uniform_index(grid.n_x());
    if (setting == Setting::Uncontrollable)
        return {xi, std::nullopt};
    return {xi, rng.uniform_index(grid.n_w())};
}

Selection us_select(const GridSpace& grid, const GridPosteriorCache& post_f,
                    const GridPosteriorCache& post_g, Setting setting,
                    const DiscreteDistribution* empirical_w) {
    auto score = [&](std::size_t idx) {
        return std::max(post_f.variance(idx), post_g.variance(idx));
    };
    if (setting == Setting::Simulator) {
        std::size_t best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t idx = 0; idx < grid.size(); ++idx)
            if (score(idx) > best_score) {
                best_score = score(idx);
                best = idx;
            }
        return {grid.flat_x(best), grid.flat_w(best)};
    }
    if (empirical_w == nullptr)
        throw std::invalid_argument("us_select: empirical distribution required");
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t xi = 0; xi < grid.n_x(); ++xi) {
        double s = 0.0;
        for (std::size_t wi = 0; wi < grid.n_w(); ++wi)
            s += (*empirical_w)[wi] * score(grid.flat(xi, wi));
        if (s > best_score) {
            best_score = s;
            best = xi;
        }
    }
    return {best, std::nullopt};
}

Selection drbo_select(const GridSpace& grid, const BoundsTable& bounds,
                      const GridPosteriorCache& post_f) {
    std::size_t best_x = 0;
    for (std::size_t xi = 1; xi < bounds.size(); ++xi)
        if (bounds.rows[xi].uf > bounds.rows[best_x].uf)
            best_x = xi;
    std::size_t best_w = 0;
    for (std::size_t wi = 1; wi < grid.n_w(); ++wi)
        if (post_f.variance(grid.flat(best_x, wi)) >
            post_f.variance(grid.flat(best_x, best_w)))
            best_w = wi;
    return {best_x, best_w};
}

namespace {

// Per-target affine structure of the one-step lower bound:
//   l'(q) = intercept + slope * y*  with the shrunk half-width folded in.
struct OneStepLower {
    double slope;
    double intercept;
};

// Precomputed state for scoring DRPTR candidates against the current M_t.
struct DrptrState {
    std::vector<std::size_t> m_designs;        // members of M_t
    std::vector<std::size_t> target_flat;      // M_t x Omega, flat grid indices
    Eigen::MatrixXd target_v;                  // t x m, L^{-1} k(obs, target)
    std::vector<double> target_mean, target_var;
    const GpPosterior* gp;
    const GridSpace* grid;
    double sqrt_beta;
};

DrptrState build_drptr_state(const GridSpace& grid, const GpPosterior& gp_g,
                             const GridPosteriorCache& post_g,
                             const BoundsTable& bounds, double beta_g) {
    DrptrState st;
    st.gp = &gp_g;
    st.grid = &grid;
    st.sqrt_beta = std::sqrt(beta_g);
    for (std::size_t xi = 0; xi < bounds.size(); ++xi)
        if (bounds.rows[xi].label == Label::M)
            st.m_designs.push_back(xi);
    const std::size_t nw = grid.n_w();
    st.target_flat.reserve(st.m_designs.size() * nw);
    for (std::size_t xi : st.m_designs)
        for (std::size_t wi = 0; wi < nw; ++wi)
            st.target_flat.push_back(grid.flat(xi, wi));
    const std::size_t m = st.target_flat.size();
    const std::size_t t = gp_g.observations().size();
    st.target_v.resize(t, m);
    for (std::size_t j = 0; j < m; ++j)
        st.target_v.col(j) = post_g.cross_solve().col(st.target_flat[j]);
    st.target_mean.resize(m);
    st.target_var.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        st.target_mean[j] = post_g.mean(st.target_flat[j]);
        st.target_var[j] = post_g.variance(st.target_flat[j]);
    }
    return st;
}

double segment_mass(double lo, double hi, double mu, double sd) {
    const double a = std::isinf(lo) ? 0.0 : normal_cdf((lo - mu) / sd);
    const double b = std::isinf(hi) ? 1.0 : normal_cdf((hi - mu) / sd);
    return std::max(b - a, 0.0);
}

double drptr_score_impl(const DrptrState& st, const GridPosteriorCache& post_g,
                        const AmbiguitySet& set, double h, double eta, double alpha,
                        double gamma, std::size_t cand_x, std::size_t cand_w) {
    const GridSpace& grid = *st.grid;
    const GpPosterior& gp = *st.gp;
    const std::size_t nw = grid.n_w();
    const std::size_t m = st.target_flat.size();
    if (m == 0)
        return 0.0;

    const std::size_t cand_flat = grid.flat(cand_x, cand_w);
    const Point cand_pt = grid.point(cand_x, cand_w);
    const double cand_var = post_g.variance(cand_flat);
    const double cand_mean = post_g.mean(cand_flat);
    const double denom = cand_var + gp.params().noise_variance;
    const double pred_sd = std::sqrt(denom);

    // Posterior covariance between each target and the candidate.
    Eigen::VectorXd cov(m);
    const std::size_t t = gp.observations().size();
    if (t == 0) {
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t fl = st.target_flat[j];
            cov[j] = kernel_eval(gp.params(), grid.point(grid.flat_x(fl), grid.flat_w(fl)),
                                 cand_pt);
        }
    } else {
        const Eigen::VectorXd v_cand = post_g.cross_solve().col(cand_flat);
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t fl = st.target_flat[j];
            cov[j] = kernel_eval(gp.params(), grid.point(grid.flat_x(fl), grid.flat_w(fl)),
                                 cand_pt) -
                     st.target_v.col(j).dot(v_cand);
        }
    }

    std::vector<OneStepLower> lower(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double slope = cov[j] / denom;
        const double shrunk =
            std::sqrt(std::max(st.target_var[j] - cov[j] * cov[j] / denom, 0.0));
        lower[j] = {slope,
                    st.target_mean[j] - slope * cand_mean - st.sqrt_beta * shrunk};
    }

    // Exact expected classification improvement over y*.
    double a_term = 0.0;
    std::vector<double> breaks, costs(nw);
    for (std::size_t mi = 0; mi < st.m_designs.size(); ++mi) {
        const std::size_t base = mi * nw;
        breaks.clear();
        for (std::size_t wi = 0; wi < nw; ++wi) {
            const OneStepLower& lb = lower[base + wi];
            if (lb.slope != 0.0)
                breaks.push_back((h - eta - lb.intercept) / lb.slope);
        }
        std::sort(breaks.begin(), breaks.end());
        const std::size_t segs = breaks.size() + 1;
        for (std::size_t s = 0; s < segs; ++s) {
            const double lo =
                s == 0 ? -std::numeric_limits<double>::infinity() : breaks[s - 1];
            const double hi = s == breaks.size()
                                  ? std::numeric_limits<double>::infinity()
                                  : breaks[s];
            if (lo >= hi)
                continue;
            double rep;
            if (std::isinf(lo))
                rep = std::isinf(hi) ? cand_mean : hi - std::max(1.0, pred_sd);
            else if (std::isinf(hi))
                rep = lo + std::max(1.0, pred_sd);
            else
                rep = 0.5 * (lo + hi);
            for (std::size_t wi = 0; wi < nw; ++wi) {
                const OneStepLower& lb = lower[base + wi];
                costs[wi] = lb.intercept + lb.slope * rep > h - eta ? 1.0 : 0.0;
            }
            if (worst_case_expectation(costs, set) > alpha)
                a_term += segment_mass(lo, hi, cand_mean, pred_sd);
        }
    }

    // Modified RMILE: analytic per-point flip probabilities at threshold h.
    double rmile = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const OneStepLower& lb = lower[j];
        if (lb.slope == 0.0) {
            rmile += lb.intercept > h ? 1.0 : 0.0;
        } else {
            const double tau = (h - lb.intercept) / lb.slope;
            const double z = (tau - cand_mean) / pred_sd;
            rmile += lb.slope > 0.0 ? 1.0 - normal_cdf(z) : normal_cdf(z);
        }
    }

    return std::max(a_term, gamma * rmile);
}

}  // namespace

double drptr_score(const GridSpace& grid, const GpPosterior& gp_g,
                   const GridPosteriorCache& post_g, const BoundsTable& bounds,
                   const AmbiguitySet& set, double beta_g, double h, double eta,
                   double alpha, double gamma, std::size_t cand_x, std::size_t cand_w) {
    const DrptrState st = build_drptr_state(grid, gp_g, post_g, bounds, beta_g);
    return drptr_score_impl(st, post_g, set, h, eta, alpha, gamma, cand_x, cand_w);
}

Selection drptr_select(const GridSpace& grid, const GpPosterior& gp_g,
                       const GridPosteriorCache& post_g, const BoundsTable& bounds,
                       const AmbiguitySet& set, double beta_g, double h, double eta,
                       double alpha, const BaselineConfig& config, Setting setting,
                       const DiscreteDistribution* empirical_w) {
    const DrptrState st = build_drptr_state(grid, gp_g, post_g, bounds, beta_g);
    if (setting == Setting::Simulator) {
        std::size_t best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t idx = 0; idx < grid.size(); ++idx) {
            const double s =
                drptr_score_impl(st, post_g, set, h, eta, alpha, config.drptr_gamma,
                                 grid.flat_x(idx), grid.flat_w(idx));
            if (s > best_score) {
                best_score = s;
                best = idx;
            }
        }
        return {grid.flat_x(best), grid.flat_w(best)};
    }
    if (empirical_w == nullptr)
        throw std::invalid_argument("drptr_select: empirical distribution required");
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t xi = 0; xi < grid.n_x(); ++xi) {
        double s = 0.0;
        for (std::size_t wi = 0; wi < grid.n_w(); ++wi)
            s += (*empirical_w)[wi] * drptr_score_impl(st, post_g, set, h, eta, alpha,
                                                       config.drptr_gamma, xi, wi);
        if (s > best_score) {
            best_score = s;
            best = xi;
        }
    }
    return {best, std::nullopt};
}

namespace {

Eigen::MatrixXd slice_covariance(const GridSpace& grid, const GpPosterior& gp,
                                 const GridPosteriorCache& post, std::size_t x_index) {
    const std::size_t nw = grid.n_w();
    Eigen::MatrixXd prior(nw, nw);
    for (std::size_t i = 0; i < nw; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v =
                kernel_eval(gp.params(), grid.point(x_index, i), grid.point(x_index, j));
            prior(i, j) = v;
            prior(j, i) = v;
        }
    if (gp.observations().empty())
        return prior;
    const std::size_t t = gp.observations().size();
    Eigen::MatrixXd v(t, nw);
    for (std::size_t wi = 0; wi < nw; ++wi)
        v.col(wi) = post.cross_solve().col(grid.flat(x_index, wi));
    return prior - v.transpose() * v;
}

Eigen::MatrixXd psd_chol(Eigen::MatrixXd cov, double scale) {
    for (int attempt = 0;; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() == Eigen::Success)
            return llt.matrixL();
        if (attempt == 8)
            throw std::runtime_error("psd_chol: covariance not factorizable");
        cov.diagonal().array() += scale * std::pow(10.0, attempt - 10);
    }
}

}  // namespace

PosteriorMoments ccbo_objective_moments(const GridSpace& grid, const GpPosterior& gp_f,
                                        std::size_t x_index,
                                        const DiscreteDistribution& reference) {
    const std::size_t nw = grid.n_w();
    std::vector<Point> slice(nw);
    for (std::size_t wi = 0; wi < nw; ++wi) slice[wi] = grid.point(x_index, wi);
    const Eigen::MatrixXd cov = gp_f.posterior_cov(slice);
    Eigen::VectorXd p(nw);
    for (std::size_t wi = 0; wi < nw; ++wi) p[wi] = reference[wi];
    double mean = 0.0;
    for (std::size_t wi = 0; wi < nw; ++wi)
        mean += reference[wi] * gp_f.posterior_at(slice[wi]).mean;
    const double var = p.dot(cov * p);
    return {mean, std::max(var, 0.0)};
}

Selection ccbo_select(const GridSpace& grid, const GpPosterior& gp_f,
                      const GpPosterior& gp_g, const GridPosteriorCache& post_f,
                      const GridPosteriorCache& post_g,
                      const DiscreteDistribution& reference, double alpha, double h,
                      const BaselineConfig& config, Rng& rng) {
    const std::size_t nx = grid.n_x();
    const std::size_t nw = grid.n_w();
    const std::size_t mc = config.ccbo_mc_samples;
    Eigen::VectorXd p(nw);
    for (std::size_t wi = 0; wi < nw; ++wi) p[wi] = reference[wi];

    // Reference-weighted objective moments per design.
    std::vector<double> mean_zf(nx), var_zf(nx), mean_zg(nx);
    for (std::size_t xi = 0; xi < nx; ++xi) {
        Eigen::VectorXd mu(nw);
        for (std::size_t wi = 0; wi < nw; ++wi) mu[wi] = post_f.mean(grid.flat(xi, wi));
        mean_zf[xi] = p.dot(mu);
        const Eigen::MatrixXd cov = slice_covariance(grid, gp_f, post_f, xi);
        var_zf[xi] = std::max(p.dot(cov * p), 0.0);
        double eg = 0.0;
        for (std::size_t wi = 0; wi < nw; ++wi) {
            const std::size_t idx = grid.flat(xi, wi);
            const double sd = std::sqrt(post_g.variance(idx));
            const double mg = post_g.mean(idx);
            eg += reference[wi] *
                  (sd == 0.0 ? (mg > h ? 1.0 : 0.0) : normal_cdf((mg - h) / sd));
        }
        mean_zg[xi] = eg;
    }

    // Incumbent: best expected objective among designs whose expected
    // feasibility probability clears alpha; fallback to the most feasible one.
    double c_feas;
    {
        double best = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (std::size_t xi = 0; xi < nx; ++xi)
            if (mean_zg[xi] > alpha) {
                any = true;
                best = std::max(best, mean_zf[xi]);
            }
        if (any) {
            c_feas = best;
        } else {
            std::size_t arg = 0;
            for (std::size_t xi = 1; xi < nx; ++xi)
                if (mean_zg[xi] > mean_zg[arg])
                    arg = xi;
            c_feas = mean_zf[arg];
        }
    }

    // MC feasibility probability and the acquisition per design.
    std::size_t best_x = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<Eigen::MatrixXd> g_chol(nx);
    std::vector<Eigen::VectorXd> g_mu(nx);
    for (std::size_t xi = 0; xi < nx; ++xi) {
        Eigen::VectorXd mu(nw);
        for (std::size_t wi = 0; wi < nw; ++wi) mu[wi] = post_g.mean(grid.flat(xi, wi));
        const Eigen::MatrixXd cov = slice_covariance(grid, gp_g, post_g, xi);
        const Eigen::MatrixXd chol =
            psd_chol(cov, gp_g.params().signal_variance);
        std::size_t hits = 0;
        Eigen::VectorXd z(nw);
        for (std::size_t s = 0; s < mc; ++s) {
            for (std::size_t wi = 0; wi < nw; ++wi) z[wi] = rng.normal();
            const Eigen::VectorXd sample = mu + chol * z;
            double prob = 0.0;
            for (std::size_t wi = 0; wi < nw; ++wi)
                if (sample[wi] > h)
                    prob += reference[wi];
            if (prob > alpha)
                ++hits;
        }
        const double pfeas = static_cast<double>(hits) / static_cast<double>(mc);
        const double score =
            gaussian_expected_improvement(mean_zf[xi], var_zf[xi], c_feas) * pfeas;
        if (score > best_score) {
            best_score = score;
            best_x = xi;
        }
        g_chol[xi] = chol;
        g_mu[xi] = mu;
    }

    // w minimizes the MC variance of the one-step acquisition at best_x.
    const Eigen::MatrixXd cov_best = slice_covariance(grid, gp_g, post_g, best_x);
    const double ei_best =
        gaussian_expected_improvement(mean_zf[best_x], var_zf[best_x], c_feas);
    std::size_t best_w = 0;
    double best_var = std::numeric_limits<double>::infinity();
    for (std::size_t ws = 0; ws < nw; ++ws) {
        const double denom = cov_best(ws, ws) + gp_g.params().noise_variance;
        const Eigen::VectorXd c = cov_best.col(ws);
        Eigen::MatrixXd cov1 = cov_best - (c * c.transpose()) / denom;
        const Eigen::MatrixXd chol1 = psd_chol(std::move(cov1),
                                               gp_g.params().signal_variance);
        // Shared inner normals across the outer y* draws.
        Eigen::MatrixXd inner(nw, mc);
        for (std::size_t s = 0; s < mc; ++s)
            for (std::size_t wi = 0; wi < nw; ++wi) inner(wi, s) = rng.normal();
        const Eigen::MatrixXd shifted = chol1 * inner;  // nw x mc
        const double mu_star = g_mu[best_x][ws];
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t s = 0; s < mc; ++s) {
            const double ystar = rng.normal(mu_star, std::sqrt(denom));
            const Eigen::VectorXd mu1 =
                g_mu[best_x] + c * ((ystar - mu_star) / denom);
            std::size_t hits = 0;
            for (std::size_t si = 0; si < mc; ++si) {
                double prob = 0.0;
                for (std::size_t wi = 0; wi < nw; ++wi)
                    if (mu1[wi] + shifted(wi, si) > h)
                        prob += reference[wi];
                if (prob > alpha)
                    ++hits;
            }
            const double val =
                ei_best * static_cast<double>(hits) / static_cast<double>(mc);
            sum += val;
            sumsq += val * val;
        }
        const double mean = sum / static_cast<double>(mc);
        const double var = sumsq / static_cast<double>(mc) - mean * mean;
        if (var < best_var) {
            best_var = var;
            best_w = ws;
        }
    }
    return {best_x, best_w};
}

}  // namespace drccbo
