#include "drccbo/gp.hpp"

#include <cmath>
#include <stdexcept>

#include "drccbo/simd_ops.hpp"

namespace drccbo {

namespace {

Eigen::VectorXd kernel_vector(const KernelParams& params,
                              const std::vector<Observation>& obs, const Point& q) {
    const std::size_t t = obs.size();
    Eigen::VectorXd k(t);
    for (std::size_t i = 0; i < t; ++i)
        k[i] = kernel_eval(params, q, Point{obs[i].x, obs[i].w});
    return k;
}

}  // namespace

GpPosterior::GpPosterior(KernelParams params) : params_(params) {
    params_.validate();
}

GpPosterior::GpPosterior(KernelParams params, std::span<const Observation> obs)
    : params_(params), obs_(obs.begin(), obs.end()) {
    params_.validate();
    for (const Observation& o : obs_)
        if (!std::isfinite(o.y))
            throw std::invalid_argument("GpPosterior: non-finite observation");
    rebuild();
}

void GpPosterior::rebuild() {
    const std::size_t t = obs_.size();
    jitter_ = 0.0;
    ++epoch_;
    if (t == 0) {
        chol_.resize(0, 0);
        alpha_.resize(0);
        return;
    }
    Eigen::MatrixXd gram(t, t);
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = kernel_eval(params_, Point{obs_[i].x, obs_[i].w},
                                         Point{obs_[j].x, obs_[j].w});
            gram(i, j) = v;
            gram(j, i) = v;
        }
    for (int attempt = 0; attempt < 2; ++attempt) {
        Eigen::MatrixXd reg = gram;
        reg.diagonal().array() += params_.noise_variance + jitter_;
        Eigen::LLT<Eigen::MatrixXd> llt(reg);
        if (llt.info() == Eigen::Success) {
            chol_ = llt.matrixL();
            refresh_alpha();
            return;
        }
        jitter_ = 1e-10 * params_.signal_variance;
    }
    throw std::runtime_error(
        "GpPosterior: Gram matrix not positive definite after jitter retry");
}

void GpPosterior::refresh_alpha() {
    const std::size_t t = obs_.size();
    Eigen::VectorXd y(t);
    for (std::size_t i = 0; i < t; ++i) y[i] = obs_[i].y;
    alpha_ = chol_.triangularView<Eigen::Lower>().solve(y);
    chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
}

GpPosterior GpPosterior::add_observation(double x, double w, double y) const {
    if (!std::isfinite(y))
        throw std::invalid_argument("GpPosterior: non-finite observation");
    GpPosterior next(*this);
    const std::size_t t = obs_.size();
    next.obs_.push_back({x, w, y});

    const Point q{x, w};
    const double diag = kernel_eval(params_, q, q) + params_.noise_variance + jitter_;
    if (t == 0) {
        next.chol_.resize(1, 1);
        next.chol_(0, 0) = std::sqrt(diag);
    } else {
        Eigen::VectorXd k = kernel_vector(params_, obs_, q);
        Eigen::VectorXd l12 = chol_.triangularView<Eigen::Lower>().solve(k);
        const double l22sq = diag - l12.squaredNorm();
        if (!(l22sq > 0.0)) {
            next.rebuild();
            return next;
        }
        next.chol_.conservativeResize(t + 1, t + 1);
        next.chol_.row(t).head(t) = l12.transpose();
        next.chol_.col(t).setZero();
        next.chol_(t, t) = std::sqrt(l22sq);
    }
    next.refresh_alpha();
    return next;
}

PosteriorMoments GpPosterior::posterior_at(const Point& q) const {
    const double prior = kernel_eval(params_, q, q);
    if (obs_.empty())
        return {0.0, prior};
    Eigen::VectorXd k = kernel_vector(params_, obs_, q);
    const double mean = k.dot(alpha_);
    Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
    const double var = prior - v.squaredNorm();
    return {mean, var > 0.0 ? var : 0.0};
}

Eigen::MatrixXd GpPosterior::posterior_cov(std::span<const Point> qs) const {
    const std::size_t m = qs.size();
    Eigen::MatrixXd prior(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = kernel_eval(params_, qs[i], qs[j]);
            prior(i, j) = v;
            prior(j, i) = v;
        }
    if (obs_.empty())
        return prior;
    const std::size_t t = obs_.size();
    Eigen::MatrixXd cross(t, m);
    for (std::size_t j = 0; j < m; ++j)
        cross.col(j) = kernel_vector(params_, obs_, qs[j]);
    Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(cross);
    return prior - v.transpose() * v;
}

GridPosteriorCache::GridPosteriorCache(const GridSpace& grid) {
    const std::size_t g = grid.size();
    qx_.resize(g);
    qw_.resize(g);
    for (std::size_t xi = 0; xi < grid.n_x(); ++xi)
        for (std::size_t wi = 0; wi < grid.n_w(); ++wi) {
            const std::size_t idx = grid.flat(xi, wi);
            qx_[idx] = grid.x_value(xi);
            qw_[idx] = grid.w_value(wi);
        }
    means_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g));
    vars_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g));
}

void GridPosteriorCache::sync(const GpPosterior& gp) {
    const std::size_t t = gp.observations().size();
    const bool incremental =
        initialized_ && t >= obs_count_ && gp.epoch() == epoch_ &&
        static_cast<std::size_t>(kstar_.rows()) == obs_count_;
    if (!incremental) {
        rebuild(gp);
    } else {
        for (std::size_t r = obs_count_; r < t; ++r) append_row(gp, r);
        obs_count_ = t;
    }
    if (t == 0) {
        means_.setZero();
        vars_ = prior_diag_;
    } else {
        means_ = kstar_.transpose() * gp.alpha();
        vars_ = (prior_diag_ - v_.colwise().squaredNorm().transpose()).cwiseMax(0.0);
    }
}

void GridPosteriorCache::rebuild(const GpPosterior& gp) {
    const std::size_t g = qx_.size();
    const std::size_t t = gp.observations().size();
    const KernelParams& p = gp.params();
    prior_diag_.resize(static_cast<Eigen::Index>(g));
    for (std::size_t i = 0; i < g; ++i) {
        const Point q{qx_[i], qw_[i]};
        prior_diag_[static_cast<Eigen::Index>(i)] = kernel_eval(p, q, q);
    }
    kstar_.resize(t, g);
    for (std::size_t r = 0; r < t; ++r) {
        const Observation& o = gp.observations()[r];
        simd::active().sq_exp_row(o.x, o.w, qx_.data(), qw_.data(), p.signal_variance,
                                  p.length_scale, kstar_.row(r).data(), g);
    }
    v_ = gp.chol().triangularView<Eigen::Lower>().solve(kstar_);
    obs_count_ = t;
    epoch_ = gp.epoch();
    initialized_ = true;
}

void GridPosteriorCache::append_row(const GpPosterior& gp, std::size_t row) {
    const std::size_t g = qx_.size();
    const KernelParams& p = gp.params();
    kstar_.conservativeResize(row + 1, g);
    v_.conservativeResize(row + 1, g);
    const Observation& o = gp.observations()[row];
    simd::active().sq_exp_row(o.x, o.w, qx_.data(), qw_.data(), p.signal_variance,
                              p.length_scale, kstar_.row(row).data(), g);
    if (row == 0) {
        v_.row(0) = kstar_.row(0) / gp.chol()(0, 0);
    } else {
        v_.row(row) =
            (kstar_.row(row) - gp.chol().row(row).head(row) * v_.topRows(row)) /
            gp.chol()(row, row);
    }
}

}  // namespace drccbo
