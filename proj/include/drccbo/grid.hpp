#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace drccbo {

/// A point in the product space X x Omega, carried by value.
struct Point {
    double x;
    double w;
};

/// Finite design set X and environment set Omega with product indexing.
/// Flat index convention: idx = xi * n_w + wi.
class GridSpace {
  public:
    GridSpace(std::vector<double> x_values, std::vector<double> w_values)
        : x_values_(std::move(x_values)), w_values_(std::move(w_values)) {
        if (x_values_.empty() || w_values_.empty())
            throw std::invalid_argument("GridSpace: empty axis");
        for (std::size_t i = 1; i < x_values_.size(); ++i)
            if (!(x_values_[i - 1] < x_values_[i]))
                throw std::invalid_argument("GridSpace: x_values not strictly increasing");
        for (std::size_t i = 1; i < w_values_.size(); ++i)
            if (!(w_values_[i - 1] < w_values_[i]))
                throw std::invalid_argument("GridSpace: w_values not strictly increasing");
    }

    std::size_t n_x() const { return x_values_.size(); }
    std::size_t n_w() const { return w_values_.size(); }
    std::size_t size() const { return n_x() * n_w(); }

    double x_value(std::size_t xi) const { return x_values_[xi]; }
    double w_value(std::size_t wi) const { return w_values_[wi]; }
    const std::vector<double>& x_values() const { return x_values_; }
    const std::vector<double>& w_values() const { return w_values_; }

    Point point(std::size_t xi, std::size_t wi) const {
        return {x_values_[xi], w_values_[wi]};
    }
    std::size_t flat(std::size_t xi, std::size_t wi) const { return xi * n_w() + wi; }
    std::size_t flat_x(std::size_t idx) const { return idx / n_w(); }
    std::size_t flat_w(std::size_t idx) const { return idx % n_w(); }

  private:
    std::vector<double> x_values_;
    std::vector<double> w_values_;
};

/// n equally spaced values on [lo, hi], both endpoints included.
std::vector<double> make_grid(double lo, double hi, std::size_t n);

}  // namespace drccbo
