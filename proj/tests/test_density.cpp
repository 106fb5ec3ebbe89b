#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fpfv/density.hpp"
#include "fpfv/errors.hpp"

using namespace fpfv;

namespace {
constexpr double pi = std::numbers::pi;

GridPtr pendulum_grid(std::size_t n) {
    return build_grid({{-pi, -pi}, {pi, pi}}, {n, n}, {Boundary::Periodic, Boundary::Neumann});
}

GridPtr line(std::size_t n, Boundary bc = Boundary::Neumann) { return build_grid({{0.0}, {1.0}}, {n}, {bc}); }

Density line_density(std::vector<double> v, Boundary bc = Boundary::Neumann) {
    const auto g = line(v.size(), bc);
    return Density(g, std::move(v));
}
}  // namespace

TEST_CASE("density basics") {
    const auto g = pendulum_grid(10);
    CHECK(Density::uniform(g).mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(Density::zeros(g).mass() == 0.0);
    CHECK_THROWS_AS(Density(g, std::vector<double>(3, 1.0)), GridMismatch);
    CHECK_THROWS_AS(Density(nullptr, {}), InvalidArgument);
    const auto u = Density::uniform(g);
    const auto back = Density::from_masses(g, u.mass_vector());
    for (std::size_t c = 0; c < g->cell_count(); ++c) CHECK(back[c] == doctest::Approx(u[c]).epsilon(1e-15));
}

TEST_CASE("projection") {
    SUBCASE("constant pdf") {
        const auto g = pendulum_grid(8);
        const auto p = project([](const Point&) { return 0.25; }, g);
        for (double v : p.values()) CHECK(v == 0.25);
    }
    SUBCASE("midpoint is exact for affine pdfs") {
        const auto g = build_grid({{0.0, 0.0}, {1.0, 2.0}}, {4, 5}, {Boundary::Neumann, Boundary::Neumann});
        const auto p = project([](const Point& x) { return 1.0 + 0.3 * x[0] + 0.2 * x[1]; }, g);
        CHECK(p.mass() == doctest::Approx(2.0 + 0.3 + 0.4).epsilon(1e-14));
    }
    SUBCASE("Gauss(2) is exact for quadratics") {
        const auto g = line(5);
        const auto p = project([](const Point& x) { return x[0] * x[0]; }, g, Quadrature::gauss(2));
        for (std::size_t c = 0; c < 5; ++c) {
            const double a = 0.2 * c, b = a + 0.2;
            CHECK(p[c] == doctest::Approx((b * b * b - a * a * a) / (3 * 0.2)).epsilon(1e-14));
        }
    }
    SUBCASE("bad pdfs") {
        const auto g = line(4);
        CHECK_THROWS_AS(project([](const Point& x) { return x[0] - 0.5; }, g), InvalidArgument);
        CHECK_THROWS_AS(project([](const Point&) { return std::nan(""); }, g), NonFiniteValue);
    }
}

TEST_CASE("normalize") {
    const auto d = line_density({1.0, 3.0, 0.0, 4.0});
    const auto n = normalize(d);
    CHECK(n.mass() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(n[1] / n[0] == doctest::Approx(3.0));
    CHECK_THROWS_AS(normalize(Density::zeros(line(4))), ZeroMass);
}

TEST_CASE("gaussian pdf") {
    const auto iso = gaussian_pdf({0.0, 0.0}, {0.64});
    CHECK(iso({0.0, 0.0, 0.0}) == doctest::Approx(1.0 / (2 * pi * 0.64)));
    CHECK(iso({0.8, 0.0, 0.0}) == doctest::Approx(std::exp(-0.5) / (2 * pi * 0.64)));
    const auto full = gaussian_pdf({1.0, -1.0}, {2.0, 0.0, 0.0, 0.5});
    CHECK(full({1.0, -1.0, 0.0}) == doctest::Approx(1.0 / (2 * pi)));
    CHECK(full({3.0, -1.0, 0.0}) == doctest::Approx(std::exp(-1.0) / (2 * pi)));
    CHECK(full({1.0, 0.0, 0.0}) == doctest::Approx(std::exp(-1.0) / (2 * pi)));
    CHECK_THROWS_AS(gaussian_pdf({0.0, 0.0}, {1.0, 2.0, 2.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(gaussian_pdf({0.0, 0.0}, {1.0, 0.0}), InvalidArgument);
}

TEST_CASE("L1 distance") {
    const auto g = pendulum_grid(6);
    const auto a = project(gaussian_pdf({0.5, 0.0}, {0.64}), g);
    const auto b = project(gaussian_pdf({-0.5, 0.3}, {0.3}), g);
    const auto c = Density::uniform(g);
    CHECK(l1_distance(a, a) == 0.0);
    CHECK(l1_distance(a, b) == l1_distance(b, a));
    CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c));
    CHECK(l1_distance(Density::zeros(g), c) == doctest::Approx(1.0).epsilon(1e-14));

    SUBCASE("prolongation") {
        const auto fine = pendulum_grid(18);
        const auto r = refine(a, *fine);
        CHECK(r.mass() == doctest::Approx(a.mass()).epsilon(1e-14));
        CHECK(l1_distance(a, r) <= 1e-15);
        CHECK(l1_distance(r, a) <= 1e-15);
        const auto p = project(gaussian_pdf({0.5, 0.0}, {0.64}), fine);
        CHECK(l1_distance(a, p) == doctest::Approx(l1_distance(r, p)).epsilon(1e-14));
    }
    SUBCASE("unrelated grids") {
        CHECK_THROWS_AS(l1_distance(a, Density::uniform(pendulum_grid(8))), GridMismatch);
        CHECK_THROWS_AS(l1_distance(a, Density::uniform(build_grid({{0.0, 0.0}, {1.0, 1.0}}, {6, 6},
                                                                    {Boundary::Periodic, Boundary::Neumann}))),
                        GridMismatch);
    }
}

TEST_CASE("expectation") {
    // midpoint rule on the uniform density: E[x^2] per axis is pi^2/3 - h^2/12
    for (std::size_t n : {10u, 50u}) {
        const auto g = pendulum_grid(n);
        const double h = g->spacing()[0];
        const double e = expectation(Density::uniform(g), [](const Point& x) { return x[0] * x[0] + x[1] * x[1]; });
        CHECK(e == doctest::Approx(2 * (pi * pi / 3 - h * h / 12)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(expectation(Density::uniform(line(4)), [](const Point&) { return INFINITY; }), NonFiniteValue);
}

TEST_CASE("moments") {
    SUBCASE("mass in one cell: midpoint mean, h^2/12 variance") {
        const auto g = build_grid({{0.0, 0.0}, {1.0, 2.0}}, {4, 5}, {Boundary::Neumann, Boundary::Neumann});
        std::vector<double> v(g->cell_count(), 0.0);
        const std::size_t c = 13;
        v[c] = 1.0 / g->cell_measure();
        const auto m = moments(Density(g, v));
        CHECK(m.mean[0] == doctest::Approx(g->midpoint(c)[0]));
        CHECK(m.mean[1] == doctest::Approx(g->midpoint(c)[1]));
        CHECK(m.covariance[0] == doctest::Approx(0.25 * 0.25 / 12));
        CHECK(m.covariance[3] == doctest::Approx(0.4 * 0.4 / 12));
        CHECK(m.covariance[1] == doctest::Approx(0.0));
        CHECK(m.stddev(1) == doctest::Approx(0.4 / std::sqrt(12.0)));
    }
    SUBCASE("uniform square reproduces the continuous variance") {
        const auto m = moments(Density::uniform(pendulum_grid(20)));
        CHECK(std::abs(m.mean[0]) <= 1e-14);
        CHECK(m.covariance[0] == doctest::Approx(pi * pi / 3).epsilon(1e-13));
        CHECK(m.covariance[3] == doctest::Approx(pi * pi / 3).epsilon(1e-13));
    }
    CHECK_THROWS_AS(moments(Density::zeros(line(3))), ZeroMass);
}

TEST_CASE("marginal") {
    const auto g = build_grid({{0.0, 0.0}, {2.0, 1.0}}, {4, 3}, {Boundary::Periodic, Boundary::Neumann});
    const std::vector<double> px{1.0, 2.0, 3.0, 4.0}, qy{0.5, 1.0, 1.5};
    std::vector<double> v(g->cell_count());
    for (std::size_t c = 0; c < v.size(); ++c) {
        const auto m = g->multi_index(c);
        v[c] = px[m[0]] * qy[m[1]];
    }
    const Density d(g, v);
    const auto mx = marginal(d, 0);
    const auto my = marginal(d, 1);
    CHECK(mx.grid().dim() == 1);
    CHECK(mx.grid().boundaries()[0] == Boundary::Periodic);
    CHECK(my.grid().boundaries()[0] == Boundary::Neumann);
    CHECK(mx.mass() == doctest::Approx(d.mass()));
    CHECK(my.mass() == doctest::Approx(d.mass()));
    // separable: marginal over x2 is px * integral of qy = px * 1.0
    for (std::size_t i = 0; i < 4; ++i) CHECK(mx[i] == doctest::Approx(px[i] * 1.0));
    for (std::size_t j = 0; j < 3; ++j) CHECK(my[j] == doctest::Approx(qy[j] * 5.0));
    CHECK_THROWS_AS(marginal(d, 2), InvalidArgument);
}

TEST_CASE("count_modes") {
    CHECK(count_modes(line_density({0.0, 1.0, 3.0, 1.0, 0.0}), 0.1) == 1);
    CHECK(count_modes(line_density({0.0, 3.0, 0.5, 3.0, 0.0}), 0.1) == 2);
    // second peak rises only 0.2 above its saddle (7% of the max)
    CHECK(count_modes(line_density({0.0, 3.0, 1.0, 1.2, 0.0}), 0.1) == 1);
    CHECK(count_modes(line_density({0.0, 3.0, 1.0, 1.2, 0.0}), 0.05) == 2);
    CHECK(count_modes(line_density({2.0, 2.0, 2.0, 2.0}), 0.1) == 1);
    CHECK(count_modes(line_density({0.0, 0.0, 0.0}), 0.1) == 0);
    CHECK(count_modes(line_density({1.0, 0.0, 1.0, 1.0, 0.0, 1.0}), 0.1) == 3);
    // wraps: the two end values are one peak on a ring
    CHECK(count_modes(line_density({3.0, 0.0, 0.0, 0.0, 3.0}, Boundary::Periodic), 0.1) == 1);
    CHECK(count_modes(line_density({3.0, 0.0, 0.0, 0.0, 3.0}, Boundary::Neumann), 0.1) == 2);
    CHECK(count_modes(line_density({1.0, 3.0, 0.0, 2.0, 0.5, 2.5}, Boundary::Periodic), 0.1) == 3);
    CHECK_THROWS_AS(count_modes(Density::uniform(pendulum_grid(4)), 0.1), InvalidArgument);
}

TEST_CASE("point symmetry") {
    const auto g = pendulum_grid(9);
    for (std::size_t c = 0; c < g->cell_count(); ++c) {
        const std::size_t m = mirror_cell(*g, c);
        CHECK(mirror_cell(*g, m) == c);
        CHECK(g->midpoint(m)[0] == doctest::Approx(-g->midpoint(c)[0]));
        CHECK(g->midpoint(m)[1] == doctest::Approx(-g->midpoint(c)[1]));
    }
    const auto sym = project(gaussian_pdf({0.0, 0.0}, {0.5, 0.2, 0.2, 0.7}), g);
    CHECK(point_symmetry_defect(sym) <= 1e-15);
    const auto shifted = project(gaussian_pdf({0.4, 0.0}, {0.5}), g);
    CHECK(point_symmetry_defect(shifted) > 0.01);
    CHECK_THROWS_AS(mirror_cell(*build_grid({{0.0}, {1.0}}, {4}, {Boundary::Periodic}), 0), InvalidArgument);
}
