#include <doctest.h>

#include <cmath>
#include <vector>

#include "drccbo/kernel.hpp"
#include "drccbo/rng.hpp"
#include "drccbo/simd_ops.hpp"

using namespace drccbo;

TEST_CASE("kernel at identical inputs equals the signal variance") {
    const KernelParams params{2500.0, 4.0, 1e-4};
    CHECK(kernel_eval(params, {0.0, 0.0}, {0.0, 0.0}) == 2500.0);
    CHECK(kernel_eval(params, {3.2, -1.7}, {3.2, -1.7}) == 2500.0);
}

TEST_CASE("kernel closed form at unit offsets") {
    const KernelParams params{1.0, 3.0, 1e-8};
    // exp(-2/3) to full double precision.
    CHECK(kernel_eval(params, {0.0, 0.0}, {1.0, 1.0}) ==
          doctest::Approx(0.51341711903259202687).epsilon(1e-15));
}

TEST_CASE("kernel is symmetric on random point pairs") {
    const KernelParams params{2.0, 1.7, 1e-6};
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const Point a{20.0 * rng.uniform() - 10.0, 20.0 * rng.uniform() - 10.0};
        const Point b{20.0 * rng.uniform() - 10.0, 20.0 * rng.uniform() - 10.0};
        CHECK(kernel_eval(params, a, b) == kernel_eval(params, b, a));
        CHECK(kernel_eval(params, a, b) <= params.signal_variance);
        CHECK(kernel_eval(params, a, b) > 0.0);
    }
}

TEST_CASE("minimum prior variance of a stationary kernel is the signal variance") {
    const GridSpace grid(make_grid(-10.0, 10.0, 10), make_grid(-10.0, 10.0, 10));
    CHECK(prior_variance_min({2500.0, 4.0, 1e-4}, grid) == 2500.0);
}

TEST_CASE("kernel parameters must be positive") {
    CHECK_THROWS(KernelParams{0.0, 1.0, 1.0}.validate());
    CHECK_THROWS(KernelParams{1.0, -1.0, 1.0}.validate());
    CHECK_THROWS(KernelParams{1.0, 1.0, 0.0}.validate());
}

TEST_CASE("scalar and active dot products agree") {
    Rng rng(5);
    for (std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t{64},
                          std::size_t{255}}) {
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.normal();
            b[i] = rng.normal();
        }
        const double s = simd::scalar_ops().dot(a.data(), b.data(), n);
        const double v = simd::active().dot(a.data(), b.data(), n);
        CHECK(v == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("scalar and AVX2 kernel rows are bit-identical") {
    const simd::Ops* vec = simd::avx2_ops();
    if (vec == nullptr)
        return;  // no vector unit on this platform; dispatch covered elsewhere
    Rng rng(6);
    for (std::size_t n : {std::size_t{1}, std::size_t{4}, std::size_t{50},
                          std::size_t{129}}) {
        std::vector<double> bx(n), bw(n), out_s(n), out_v(n);
        for (std::size_t i = 0; i < n; ++i) {
            bx[i] = 20.0 * rng.uniform() - 10.0;
            bw[i] = 20.0 * rng.uniform() - 10.0;
        }
        const double ax = 20.0 * rng.uniform() - 10.0;
        const double aw = 20.0 * rng.uniform() - 10.0;
        simd::scalar_ops().sq_exp_row(ax, aw, bx.data(), bw.data(), 2500.0, 4.0,
                                      out_s.data(), n);
        vec->sq_exp_row(ax, aw, bx.data(), bw.data(), 2500.0, 4.0, out_v.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(out_s[i] == out_v[i]);
    }
}

TEST_CASE("kernel row matches elementwise kernel evaluation") {
    const KernelParams params{2500.0, 4.0, 1e-4};
    Rng rng(8);
    const std::size_t n = 33;
    std::vector<double> bx(n), bw(n), out(n);
    for (std::size_t i = 0; i < n; ++i) {
        bx[i] = 20.0 * rng.uniform() - 10.0;
        bw[i] = 20.0 * rng.uniform() - 10.0;
    }
    simd::active().sq_exp_row(1.5, -2.5, bx.data(), bw.data(), params.signal_variance,
                              params.length_scale, out.data(), n);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(out[i] ==
              doctest::Approx(kernel_eval(params, {1.5, -2.5}, {bx[i], bw[i]}))
                  .epsilon(1e-14));
}
