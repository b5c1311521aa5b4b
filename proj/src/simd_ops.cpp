#include "drccbo/simd_ops.hpp"

#include <cmath>

namespace drccbo::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void sq_exp_row_scalar(double ax, double aw, const double* bx, const double* bw,
                       double sigma2, double scale, double* out, std::size_t n) {
    const double inv = -1.0 / scale;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = ax - bx[i];
        const double dw = aw - bw[i];
        double d2 = dx * dx;
        d2 += dw * dw;
        out[i] = sigma2 * std::exp(d2 * inv);
    }
}

const Ops kScalar{"scalar", dot_scalar, sq_exp_row_scalar};

}  // namespace

const Ops& scalar_ops() { return kScalar; }

const Ops& active() {
    static const Ops& ops = []() -> const Ops& {
        if (const Ops* v = avx2_ops())
            return *v;
        return kScalar;
    }();
    return ops;
}

}  // namespace drccbo::simd
