#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "drccbo/grid.hpp"
#include "drccbo/kernel.hpp"

namespace drccbo {

struct Observation {
    double x;
    double w;
    double y;
};

struct PosteriorMoments {
    double mean;
    double variance;
};

/// GP regression state over X x Omega. Immutable after construction;
/// add_observation returns a new value whose queries match a from-scratch
/// rebuild. The Cholesky factor of K + sigma2_noise I is extended one row
/// per observation; if the extension loses positive definiteness the state
/// is rebuilt with a single jitter retry (1e-10 * signal_variance).
class GpPosterior {
  public:
    explicit GpPosterior(KernelParams params);
    GpPosterior(KernelParams params, std::span<const Observation> obs);

    GpPosterior add_observation(double x, double w, double y) const;

    PosteriorMoments posterior_at(const Point& q) const;

    /// Posterior covariance matrix of the latent values at the given points.
    Eigen::MatrixXd posterior_cov(std::span<const Point> qs) const;

    const KernelParams& params() const { return params_; }
    const std::vector<Observation>& observations() const { return obs_; }
    double jitter() const { return jitter_; }
    const Eigen::MatrixXd& chol() const { return chol_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }
    // Bumped on every non-incremental refactorization; lets caches detect
    // that previously seen Cholesky rows are stale.
    std::uint64_t epoch() const { return epoch_; }

  private:
    void rebuild();
    void refresh_alpha();

    KernelParams params_;
    std::vector<Observation> obs_;
    Eigen::MatrixXd chol_;   // lower-triangular factor of K + sigma2_noise I + jitter I
    Eigen::VectorXd alpha_;  // (K + sigma2_noise I)^{-1} y
    double jitter_ = 0.0;
    std::uint64_t epoch_ = 0;
};

/// Per-grid posterior sweep kept in sync with a growing GP. Appending one
/// observation costs O(t * |grid|) instead of a full O(t^2 * |grid|)
/// recomputation; sync falls back to a full rebuild when the GP was
/// refactorized (jitter change or non-incremental history).
class GridPosteriorCache {
  public:
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    explicit GridPosteriorCache(const GridSpace& grid);

    void sync(const GpPosterior& gp);

    double mean(std::size_t flat_idx) const { return means_[flat_idx]; }
    double variance(std::size_t flat_idx) const { return vars_[flat_idx]; }
    const Eigen::VectorXd& means() const { return means_; }
    const Eigen::VectorXd& variances() const { return vars_; }
    /// L^{-1} K(obs, grid); column j belongs to flat grid index j.
    const RowMat& cross_solve() const { return v_; }

  private:

    void rebuild(const GpPosterior& gp);
    void append_row(const GpPosterior& gp, std::size_t row);

    std::vector<double> qx_, qw_;
    Eigen::VectorXd prior_diag_;
    RowMat kstar_;  // t x G
    RowMat v_;      // t x G, L^{-1} kstar
    Eigen::VectorXd means_, vars_;
    std::size_t obs_count_ = 0;
    std::uint64_t epoch_ = 0;
    bool initialized_ = false;
};

}  // namespace drccbo
