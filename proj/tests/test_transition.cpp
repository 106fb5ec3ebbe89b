#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fpfv/errors.hpp"
#include "fpfv/parallel.hpp"
#include "fpfv/transition.hpp"

using namespace fpfv;

namespace {
constexpr double pi = std::numbers::pi;
const double kDefaultXi = pi / (2 * pi + 1);

GridPtr pendulum_grid(std::size_t n) {
    return build_grid({{-pi, -pi}, {pi, pi}}, {n, n}, {Boundary::Periodic, Boundary::Neumann});
}

Density random_density(const GridPtr& g, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(g->cell_count());
    for (double& x : v) x = u(gen);
    return Density(g, v);
}

// Direct evaluation of the upwind update, cell by cell, from the face fluxes:
// p_K' = p_K - dt/|K| sum_L v_KL p_KL, p_KL the upwind value (0 outside the box).
std::vector<double> upwind_reference(const Grid& g, const EdgeFluxes& f, double dt, std::span<const double> p) {
    std::vector<double> next(p.begin(), p.end());
    for (std::size_t k = 0; k < g.cell_count(); ++k) {
        double s = 0.0;
        for (const auto& nb : g.neighbors(k)) {
            const double v = f.outward(nb.edge, nb.orientation);
            const double upwind = v >= 0.0 ? p[k] : (nb.cell ? p[*nb.cell] : 0.0);
            s += v * upwind;
        }
        next[k] = p[k] - dt / g.cell_measure() * s;
    }
    return next;
}

double total(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}
}  // namespace

TEST_CASE("max_stable_dt") {
    SUBCASE("pendulum: at least the field-bound step") {
        for (std::size_t n : {10u, 50u}) {
            const auto g = pendulum_grid(n);
            const auto f = compute_fluxes(pendulum_field(1.0), *g);
            const auto r = max_stable_dt(f, *g, kDefaultXi);
            const double h = g->spacing()[0];
            CHECK(r.dt_max >= (1 - kDefaultXi) * h / (pi + 1));
            CHECK(r.dt_max * r.max_outflow == doctest::Approx((1 - kDefaultXi) * g->cell_measure()));
            CHECK(simplified_cfl_dt(pendulum_field(1.0), *g, kDefaultXi) == doctest::Approx(h / (2 * pi + 1)).epsilon(1e-14));
        }
    }
    SUBCASE("zero field is unbounded") {
        const auto g = pendulum_grid(4);
        CHECK(max_stable_dt(compute_fluxes(zero_field(2), *g), *g, 0.5).unbounded());
    }
    SUBCASE("1D constant advection") {
        const auto g = build_grid({{0.0}, {2.0}}, {10}, {Boundary::Periodic});
        const auto r = max_stable_dt(compute_fluxes(constant_field({3.0}), *g), *g, 0.25);
        CHECK(r.dt_max == doctest::Approx(0.75 * 0.2 / 3.0).epsilon(1e-15));
    }
    SUBCASE("xi out of range") {
        const auto g = pendulum_grid(4);
        const auto f = compute_fluxes(pendulum_field(1.0), *g);
        CHECK_THROWS_AS(max_stable_dt(f, *g, 1.0), InvalidArgument);
        CHECK_THROWS_AS(max_stable_dt(f, *g, -0.1), InvalidArgument);
    }
}

TEST_CASE("1D constant advection assembles the hand-derived circulant") {
    for (std::size_t n : {2u, 3u, 8u, 16u}) {
        for (double nu : {0.25, 0.5, 1.0}) {
            const auto g = build_grid({{0.0}, {1.0}}, {n}, {Boundary::Periodic});
            const double c = 1.0;
            const double dt = nu * g->spacing()[0] / c;
            const auto op = assemble(compute_fluxes(constant_field({c}), *g), g, dt);
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t col = 0; col < n; ++col) {
                    double expected = 0.0;
                    if (col == r) expected += 1.0 - nu;
                    if (col == (r + 1) % n) expected += nu;
                    CHECK(std::abs(op.rows().at(r, col) - expected) <= 1e-15);
                }
            }
            CHECK(op.mass_conserving());
        }
    }
}

TEST_CASE("assembled step reproduces the direct upwind update") {
    SUBCASE("pendulum") {
        const auto g = pendulum_grid(12);
        const auto f = compute_fluxes(pendulum_field(1.0), *g);
        const double dt = max_stable_dt(f, *g, 0.1).dt_max;
        const auto op = assemble(f, g, dt);
        const auto p = random_density(g, 3);
        const auto ref = upwind_reference(*g, f, dt, p.values());
        const auto got = step(op, p);
        for (std::size_t k = 0; k < g->cell_count(); ++k) CHECK(got[k] == doctest::Approx(ref[k]).epsilon(1e-13));
    }
    SUBCASE("rotation on a Dirichlet box") {
        const auto g = build_grid({{-1.0, -1.0}, {1.0, 1.0}}, {9, 7}, {Boundary::Dirichlet, Boundary::Dirichlet});
        const auto f = compute_fluxes(rotation_field(), *g, Quadrature::gauss(3));
        const double dt = max_stable_dt(f, *g, 0.0).dt_max;
        const auto op = assemble(f, g, dt);
        CHECK_FALSE(op.mass_conserving());
        const auto p = random_density(g, 4);
        const auto ref = upwind_reference(*g, f, dt, p.values());
        const auto got = step(op, p);
        for (std::size_t k = 0; k < g->cell_count(); ++k) CHECK(got[k] == doctest::Approx(ref[k]).epsilon(1e-13));
        CHECK(got.mass() < p.mass());
        for (std::size_t r = 0; r < op.rows().rows(); ++r) {
            double s = 0.0;
            for (std::size_t k = op.rows().offsets[r]; k < op.rows().offsets[r + 1]; ++k) s += op.rows().values[k];
            CHECK(s <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("zero field gives the identity") {
    const auto g = pendulum_grid(5);
    const auto op = assemble(compute_fluxes(zero_field(2), *g), g, 0.3);
    CHECK(op.rows().nonzeros() == g->cell_count());
    const auto report = verify_markov(op, 1e-12);
    CHECK(report.is_markov);
    CHECK(report.min_entry == 1.0);
    CHECK(report.max_row_sum_error == 0.0);
    const auto p = random_density(g, 9);
    const auto q = step(op, p);
    for (std::size_t k = 0; k < g->cell_count(); ++k) CHECK(q[k] == doctest::Approx(p[k]).epsilon(1e-15));
}

TEST_CASE("pendulum operator is stochastic under the CFL step") {
    const auto g = pendulum_grid(50);
    const auto f = compute_fluxes(pendulum_field(1.0), *g);
    const auto op = assemble(f, g, g->spacing()[0] / (2 * pi + 1));
    CHECK(op.mass_conserving());
    const auto report = verify_markov(op, 1e-12);
    CHECK(report.min_entry >= 0.0);
    CHECK(report.max_row_sum_error <= 1e-12);
    CHECK(report.is_markov);
    for (std::size_t r = 0; r < op.rows().rows(); ++r) CHECK(op.rows().offsets[r + 1] - op.rows().offsets[r] <= 5);
}

TEST_CASE("CFL gate") {
    const auto g = pendulum_grid(20);
    const auto f = compute_fluxes(pendulum_field(1.0), *g);
    const auto cfl = max_stable_dt(f, *g, 0.0);
    CHECK_THROWS_AS(assemble(f, g, 2.0 * cfl.dt_max), CflViolation);
    try {
        assemble(f, g, 2.0 * cfl.dt_max);
    } catch (const CflViolation& e) {
        CHECK(e.binding_cell() == cfl.binding_cell);
    }
    const auto bad = assemble_unchecked(f, g, 2.0 * cfl.dt_max);
    const auto report = verify_markov(bad, 1e-12);
    CHECK(report.min_entry < 0.0);
    CHECK_FALSE(report.is_markov);
    CHECK(bad.rows().at(cfl.binding_cell, cfl.binding_cell) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(assemble(f, g, 0.0), InvalidArgument);
}

TEST_CASE("step semantics") {
    const auto g = build_grid({{0.0}, {1.0}}, {8}, {Boundary::Periodic});
    SUBCASE("nu = 1 shifts masses cyclically") {
        const auto op = assemble(compute_fluxes(constant_field({1.0}), *g), g, g->spacing()[0]);
        const auto p = random_density(g, 1);
        const auto q = step(op, p);
        for (std::size_t k = 0; k < 8; ++k) CHECK(q[(k + 1) % 8] == doctest::Approx(p[k]).epsilon(1e-15));
    }
    SUBCASE("a point mass splits between its cell and the downwind cells") {
        const auto g2 = pendulum_grid(10);
        const auto f = compute_fluxes(pendulum_field(1.0), *g2);
        const double dt = max_stable_dt(f, *g2, 0.2).dt_max;
        const auto op = assemble(f, g2, dt);
        const std::size_t cell = 37;
        std::vector<double> v(g2->cell_count(), 0.0);
        v[cell] = 1.0 / g2->cell_measure();
        const auto q = step(op, Density(g2, v)).mass_vector();
        double out = 0.0;
        for (const auto& nb : g2->neighbors(cell)) {
            const double flux = f.outward(nb.edge, nb.orientation);
            if (flux > 0.0) {
                CHECK(q[*nb.cell] == doctest::Approx(dt * flux / g2->cell_measure()));
                out += flux;
            } else {
                CHECK(q[*nb.cell] == 0.0);
            }
        }
        CHECK(q[cell] == doctest::Approx(1.0 - dt * out / g2->cell_measure()));
        CHECK(total(q) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("grid mismatch") {
        const auto op = assemble(compute_fluxes(constant_field({1.0}), *g), g, 0.01);
        const auto other = build_grid({{0.0}, {1.0}}, {4}, {Boundary::Periodic});
        CHECK_THROWS_AS(step(op, Density::uniform(other)), GridMismatch);
    }
}

TEST_CASE("evolve counts completed steps") {
    const auto g = pendulum_grid(16);
    const auto f = compute_fluxes(pendulum_field(1.0), *g);
    const double dt = max_stable_dt(f, *g, 0.3).dt_max;
    const auto op = assemble(f, g, dt);
    const auto p = random_density(g, 5);

    const auto early = evolve(op, p, 0.9 * dt);
    for (std::size_t k = 0; k < g->cell_count(); ++k) CHECK(early[k] == doctest::Approx(p[k]).epsilon(1e-15));

    const auto three = evolve(op, p, 3 * dt);
    const auto manual = step(op, step(op, step(op, p)));
    CHECK(std::equal(three.values().begin(), three.values().end(), manual.values().begin()));

    // semigroup: evolve(2k dt) == step^(2k), bit for bit
    Density iter = p;
    for (int i = 0; i < 10; ++i) iter = step(op, iter);
    const auto ten = evolve(op, p, 10 * dt);
    CHECK(std::equal(ten.values().begin(), ten.values().end(), iter.values().begin()));
    CHECK(steps_until(0.1 * 3, 0.1) == 3);
    CHECK(steps_until(0.0, 0.1) == 0);
}

TEST_CASE("mass conservation holds for any dt, positivity under CFL, linearity") {
    const auto g = pendulum_grid(24);
    const auto f = compute_fluxes(pendulum_field(1.0), *g);
    const double dt_max = max_stable_dt(f, *g, 0.0).dt_max;
    for (double scale : {0.1, 0.7, 1.0, 3.0}) {
        const auto op = assemble_unchecked(f, g, scale * dt_max);
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const auto p = random_density(g, seed);
            const auto q = step(op, p);
            CHECK(std::abs(q.mass() - p.mass()) <= 1e-12 * p.mass());
            if (scale <= 1.0) CHECK(q.min_value() >= 0.0);
        }
    }
    const auto op = assemble(f, g, 0.5 * dt_max);
    const auto a = random_density(g, 11).mass_vector();
    const auto b = random_density(g, 12).mass_vector();
    std::vector<double> combo(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) combo[i] = 0.3 * a[i] - 1.7 * b[i];
    const auto sa = op.apply(a), sb = op.apply(b), sc = op.apply(combo);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(sc[i] - (0.3 * sa[i] - 1.7 * sb[i])) <= 1e-12);
}

TEST_CASE("uniform density under the pendulum operator") {
    SUBCASE("torus: exactly stationary") {
        const auto g = build_grid({{-pi, -pi}, {pi, pi}}, {50, 50}, {Boundary::Periodic, Boundary::Periodic});
        const auto op = assemble(compute_fluxes(pendulum_field(1.0), *g), g, g->spacing()[0] / (2 * pi + 1));
        const auto u = Density::uniform(g);
        CHECK(l1_distance(step(op, u), u) <= 1e-12);
    }
    SUBCASE("Neumann rows change by exactly the dropped face flux") {
        const auto g = pendulum_grid(50);
        const auto f = compute_fluxes(pendulum_field(1.0), *g);
        const double dt = g->spacing()[0] / (2 * pi + 1);
        const auto op = assemble(f, g, dt);
        const auto u = Density::uniform(g);
        const auto next = step(op, u);
        const auto div = discrete_divergence(f, *g);
        double predicted = 0.0;
        for (std::size_t c = 0; c < g->cell_count(); ++c) {
            // uniform p: p' - p = -dt/|K| p sum_L v_KL
            const double expected = u[c] * (1.0 - dt / g->cell_measure() * div[c]);
            CHECK(next[c] == doctest::Approx(expected).epsilon(1e-13));
            predicted += std::abs(expected - u[c]) * g->cell_measure();
        }
        CHECK(l1_distance(next, u) == doctest::Approx(predicted).epsilon(1e-9));
        CHECK(next.mass() == doctest::Approx(u.mass()).epsilon(1e-12));
    }
}

TEST_CASE("stationary distributions") {
    SUBCASE("identity returns the uniform density at once") {
        const auto g = pendulum_grid(6);
        const auto op = assemble(compute_fluxes(zero_field(2), *g), g, 1.0);
        const auto r = stationary(op, 1e-14, 10);
        CHECK(r.iterations == 1);
        CHECK(l1_distance(r.density, Density::uniform(g)) <= 1e-15);
    }
    SUBCASE("circulant") {
        const auto g = build_grid({{0.0}, {1.0}}, {8}, {Boundary::Periodic});
        const auto op = assemble(compute_fluxes(constant_field({1.0}), *g), g, 0.05);
        const auto r = stationary(op, 1e-14, 10);
        CHECK(l1_distance(r.density, Density::uniform(g)) <= 1e-14);
    }
    SUBCASE("compressible 1D field converges to a density proportional to 1/v") {
        const auto g = build_grid({{0.0}, {1.0}}, {32}, {Boundary::Periodic});
        VelocityField f;
        f.dim = 1;
        f.eval = [](const Point& x) { return Point{1.0 + 0.5 * std::sin(2 * pi * x[0]), 0.0, 0.0}; };
        const auto fluxes = compute_fluxes(f, *g);
        const auto op = assemble(fluxes, g, max_stable_dt(fluxes, *g, 0.1).dt_max);
        CHECK_THROWS_AS(stationary(op, 1e-13, 3), NoConvergence);
        const auto r = stationary(op, 1e-13, 200000);
        // discrete balance: the upwind mass flux v_{K,K+1} p_K is the same across every face
        for (std::size_t k = 0; k < 32; ++k) {
            const std::size_t face = k;  // 1D periodic: edge k is the upper face of cell k
            CHECK(fluxes.flux[face] * r.density[k] == doctest::Approx(fluxes.flux[0] * r.density[0]).epsilon(1e-9));
        }
    }
    SUBCASE("lossy operators are rejected") {
        const auto g = build_grid({{0.0}, {1.0}}, {8}, {Boundary::Dirichlet});
        const auto op = assemble(compute_fluxes(constant_field({1.0}), *g), g, 0.05);
        CHECK_THROWS_AS(stationary(op, 1e-12, 10), InvalidArgument);
    }
}

TEST_CASE("apply is bit-identical across thread counts") {
    const auto g = pendulum_grid(100);
    const auto f = compute_fluxes(pendulum_field(1.0), *g);
    const auto op = assemble(f, g, g->spacing()[0] / (2 * pi + 1));
    const auto p = random_density(g, 21).mass_vector();
    set_thread_count(1);
    const auto one = op.apply(p);
    set_thread_count(4);
    const auto four = op.apply(p);
    set_thread_count(1);
    CHECK(one == four);
}

TEST_CASE("triplet export") {
    const auto g = build_grid({{0.0}, {1.0}}, {4}, {Boundary::Periodic});
    const auto op = assemble(compute_fluxes(constant_field({1.0}), *g), g, 0.125);
    std::ostringstream out;
    write_triplets(out, op);
    CHECK(out.str() ==
          "# cells=4 dt=0.125\n"
          "0 0 0.5\n0 1 0.5\n1 1 0.5\n1 2 0.5\n2 2 0.5\n2 3 0.5\n3 0 0.5\n3 3 0.5\n");
}
