#include "drccbo/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace drccbo {

bool BoundsTable::any(Label l) const {
    return std::any_of(rows.begin(), rows.end(),
                       [l](const DesignBounds& r) { return r.label == l; });
}

std::size_t BoundsTable::count(Label l) const {
    return static_cast<std::size_t>(std::count_if(
        rows.begin(), rows.end(), [l](const DesignBounds& r) { return r.label == l; }));
}

double beta_schedule(std::size_t t, std::size_t product_size, double delta) {
    if (t < 1)
        throw std::invalid_argument("beta_schedule: t must be >= 1");
    const double td = static_cast<double>(t);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return 2.0 * std::log(2.0 * static_cast<double>(product_size) * pi2 * td * td /
                          (3.0 * delta));
}

double eta_parameter(double xi, double delta, double sigma0min_g,
                     std::size_t product_size) {
    if (!(xi > 0.0) || !(delta > 0.0) || !(sigma0min_g > 0.0) || product_size == 0)
        throw std::invalid_argument("eta_parameter: inputs must be positive");
    const double a = xi * sigma0min_g / 2.0;
    const double b =
        xi * xi * delta * sigma0min_g / (8.0 * static_cast<double>(product_size));
    return std::min(a, b);
}

Interval credible_interval(const GpPosterior& gp, const Point& q, double beta) {
    if (!(beta >= 0.0))
        throw std::invalid_argument("credible_interval: beta must be nonnegative");
    const PosteriorMoments m = gp.posterior_at(q);
    const double half = std::sqrt(beta) * std::sqrt(m.variance);
    return {m.mean - half, m.mean + half};
}

Interval indicator_interval(double l_g, double u_g, double h, double eta) {
    if (l_g > u_g)
        throw std::invalid_argument("indicator_interval: l_g > u_g");
    if (l_g > h - eta)
        return {1.0, 1.0};
    if (u_g > h)
        return {0.0, 1.0};
    return {0.0, 0.0};
}

namespace {

Interval f_bounds_from_envelopes(std::span<const double> lower,
                                 std::span<const double> upper,
                                 const AmbiguitySet& set) {
    return {worst_case_expectation(lower, set), worst_case_expectation(upper, set)};
}

}  // namespace

Interval f_bounds(const GridSpace& grid, std::size_t x_index, const GpPosterior& gp_f,
                  double beta_f, const AmbiguitySet& set) {
    const std::size_t nw = grid.n_w();
    std::vector<double> lo(nw), hi(nw);
    for (std::size_t wi = 0; wi < nw; ++wi) {
        const Interval ci = credible_interval(gp_f, grid.point(x_index, wi), beta_f);
        lo[wi] = ci.lower;
        hi[wi] = ci.upper;
    }
    return f_bounds_from_envelopes(lo, hi, set);
}

Interval g_bounds(const GridSpace& grid, std::size_t x_index, const GpPosterior& gp_g,
                  double beta_g, double h, double eta, const AmbiguitySet& set) {
    const std::size_t nw = grid.n_w();
    std::vector<double> lo(nw), hi(nw);
    for (std::size_t wi = 0; wi < nw; ++wi) {
        const Interval ci = credible_interval(gp_g, grid.point(x_index, wi), beta_g);
        const Interval ind = indicator_interval(ci.lower, ci.upper, h, eta);
        lo[wi] = ind.lower;
        hi[wi] = ind.upper;
    }
    return f_bounds_from_envelopes(lo, hi, set);
}

Label classify(double lg, double ug, double alpha, double xi) {
    if (lg > ug)
        throw std::invalid_argument("classify: lg > ug");
    if (lg > alpha - xi)
        return Label::H;
    if (ug <= alpha)
        return Label::L;
    return Label::M;
}

BoundsTable compute_bounds_table(const GridSpace& grid, const GridPosteriorCache& post_f,
                                 const GridPosteriorCache& post_g, double beta_f,
                                 double beta_g, double h, double eta, double alpha,
                                 double xi, const AmbiguitySet& set) {
    const std::size_t nx = grid.n_x();
    const std::size_t nw = grid.n_w();
    const double rf = std::sqrt(beta_f);
    const double rg = std::sqrt(beta_g);
    BoundsTable table;
    table.rows.resize(nx);
    std::vector<double> lf(nw), uf(nw), lg(nw), ug(nw);
    for (std::size_t xi_ = 0; xi_ < nx; ++xi_) {
        for (std::size_t wi = 0; wi < nw; ++wi) {
            const std::size_t idx = grid.flat(xi_, wi);
            const double sf = rf * std::sqrt(post_f.variance(idx));
            lf[wi] = post_f.mean(idx) - sf;
            uf[wi] = post_f.mean(idx) + sf;
            const double sg = rg * std::sqrt(post_g.variance(idx));
            const Interval ind =
                indicator_interval(post_g.mean(idx) - sg, post_g.mean(idx) + sg, h, eta);
            lg[wi] = ind.lower;
            ug[wi] = ind.upper;
        }
        DesignBounds& row = table.rows[xi_];
        row.lf = worst_case_expectation(lf, set);
        row.uf = worst_case_expectation(uf, set);
        row.lg = worst_case_expectation(lg, set);
        row.ug = worst_case_expectation(ug, set);
        row.label = classify(row.lg, row.ug, alpha, xi);
    }
    return table;
}

double current_best(const BoundsTable& table) {
    double best;
    if (table.any(Label::H)) {
        best = -std::numeric_limits<double>::infinity();
        for (const DesignBounds& r : table.rows)
            if (r.label == Label::H)
                best = std::max(best, r.lf);
    } else if (table.any(Label::M)) {
        best = std::numeric_limits<double>::infinity();
        for (const DesignBounds& r : table.rows)
            if (r.label == Label::M)
                best = std::min(best, r.lf);
    } else {
        best = std::numeric_limits<double>::infinity();
        for (const DesignBounds& r : table.rows) best = std::min(best, r.lf);
    }
    return best;
}

double acquisition(std::size_t x_index, const BoundsTable& table, double cbest,
                   double alpha, double xi) {
    const DesignBounds& r = table.rows.at(x_index);
    const double af = std::max(r.uf - cbest, 0.0);
    double ag;
    switch (r.label) {
        case Label::H:
            ag = 1.0;
            break;
        case Label::L:
            ag = 0.0;
            break;
        case Label::M:
            if (r.ug == r.lg)
                throw std::logic_error(
                    "acquisition: degenerate G interval on an M-labeled design");
            ag = (r.ug - (alpha - xi)) / (r.ug - r.lg);
            break;
        default:
            ag = 0.0;
    }
    return af * ag;
}

std::size_t select_x(const BoundsTable& table, std::span<const double> acq) {
    std::size_t best = table.size();
    for (std::size_t i = 0; i < table.size(); ++i) {
        const Label l = table.rows[i].label;
        if (l == Label::L)
            continue;
        if (best == table.size() || acq[i] > acq[best])
            best = i;
    }
    if (best == table.size())
        throw std::logic_error("select_x: H union M is empty");
    return best;
}

std::size_t select_w_simulator(const GridSpace& grid, std::size_t x_next,
                               const GpPosterior& gp_f, const GpPosterior& gp_g) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t wi = 0; wi < grid.n_w(); ++wi) {
        const Point q = grid.point(x_next, wi);
        const double score =
            gp_f.posterior_at(q).variance + gp_g.posterior_at(q).variance;
        if (score > best_score) {
            best_score = score;
            best = wi;
        }
    }
    return best;
}

std::size_t select_w_simulator(const GridSpace& grid, std::size_t x_next,
                               const GridPosteriorCache& post_f,
                               const GridPosteriorCache& post_g) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t wi = 0; wi < grid.n_w(); ++wi) {
        const std::size_t idx = grid.flat(x_next, wi);
        const double score = post_f.variance(idx) + post_g.variance(idx);
        if (score > best_score) {
            best_score = score;
            best = wi;
        }
    }
    return best;
}

StopStatus stopping(const BoundsTable& table, double xi) {
    if (table.count(Label::L) == table.size())
        return {StopKind::NoSolution, std::nullopt};
    if (!table.any(Label::H))
        return {StopKind::Continue, std::nullopt};
    double max_u = -std::numeric_limits<double>::infinity();
    double max_l = -std::numeric_limits<double>::infinity();
    std::size_t rec = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const DesignBounds& r = table.rows[i];
        if (r.label == Label::H || r.label == Label::M)
            max_u = std::max(max_u, r.uf);
        if (r.label == Label::H && r.lf > max_l) {
            max_l = r.lf;
            rec = i;
        }
    }
    if (max_u - max_l < xi)
        return {StopKind::Converged, rec};
    return {StopKind::Continue, std::nullopt};
}

}  // namespace drccbo
