#include "drccbo/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace drccbo {

double kernel_eval(const KernelParams& params, const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dw = a.w - b.w;
    return params.signal_variance *
           std::exp(-(dx * dx + dw * dw) / params.length_scale);
}

double prior_variance_min(const KernelParams& params, const GridSpace& grid) {
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t xi = 0; xi < grid.n_x(); ++xi)
        for (std::size_t wi = 0; wi < grid.n_w(); ++wi) {
            const Point q = grid.point(xi, wi);
            vmin = std::min(vmin, kernel_eval(params, q, q));
        }
    return vmin;
}

}  // namespace drccbo
