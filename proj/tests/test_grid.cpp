#include <doctest.h>

#include "drccbo/grid.hpp"

using namespace drccbo;

TEST_CASE("make_grid pins both endpoints and uses a uniform step") {
    const std::vector<double> g = make_grid(-10.0, 10.0, 50);
    REQUIRE(g.size() == 50);
    CHECK(g.front() == -10.0);
    CHECK(g.back() == 10.0);
    const double step = 20.0 / 49.0;
    for (std::size_t i = 1; i < g.size(); ++i)
        CHECK(g[i] - g[i - 1] == doctest::Approx(step).epsilon(1e-12));
}

TEST_CASE("make_grid covers the epidemic parameter interval") {
    const std::vector<double> g = make_grid(0.01, 0.5, 50);
    REQUIRE(g.size() == 50);
    CHECK(g.front() == 0.01);
    CHECK(g.back() == 0.5);
}

TEST_CASE("make_grid rejects degenerate requests") {
    CHECK_THROWS(make_grid(0.0, 1.0, 1));
    CHECK_THROWS(make_grid(1.0, 0.0, 10));
}

TEST_CASE("flat indexing round-trips") {
    const GridSpace grid(make_grid(0.0, 1.0, 7), make_grid(0.0, 1.0, 5));
    CHECK(grid.size() == 35);
    for (std::size_t xi = 0; xi < grid.n_x(); ++xi)
        for (std::size_t wi = 0; wi < grid.n_w(); ++wi) {
            const std::size_t idx = grid.flat(xi, wi);
            CHECK(grid.flat_x(idx) == xi);
            CHECK(grid.flat_w(idx) == wi);
        }
}

TEST_CASE("grid axes must be strictly increasing and nonempty") {
    CHECK_THROWS(GridSpace({}, {0.0}));
    CHECK_THROWS(GridSpace({0.0, 0.0}, {0.0}));
    CHECK_THROWS(GridSpace({1.0, 0.0}, {0.0}));
}
