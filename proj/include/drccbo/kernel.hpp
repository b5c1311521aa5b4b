#pragma once

#include <stdexcept>

#include "drccbo/grid.hpp"

namespace drccbo {

/// Squared-exponential kernel parameters: sigma2 * exp(-||a - b||^2 / length_scale).
struct KernelParams {
    double signal_variance;
    double length_scale;
    double noise_variance;

    void validate() const {
        if (!(signal_variance > 0.0) || !(length_scale > 0.0) || !(noise_variance > 0.0))
            throw std::invalid_argument("KernelParams: all parameters must be positive");
    }
};

double kernel_eval(const KernelParams& params, const Point& a, const Point& b);

/// Minimum prior variance over the grid; equals signal_variance for this
/// stationary kernel but computed by scanning the diagonal.
double prior_variance_min(const KernelParams& params, const GridSpace& grid);

}  // namespace drccbo
