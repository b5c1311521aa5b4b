#include "drccbo/grid.hpp"

namespace drccbo {

std::vector<double> make_grid(double lo, double hi, std::size_t n) {
    if (n < 2)
        throw std::invalid_argument("make_grid: need at least two points");
    if (!(lo < hi))
        throw std::invalid_argument("make_grid: lo must be below hi");
    std::vector<double> v(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + step * static_cast<double>(i);
    v.back() = hi;
    return v;
}

}  // namespace drccbo
