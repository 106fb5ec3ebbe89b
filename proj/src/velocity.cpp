#include "fpfv/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fpfv/errors.hpp"
#include "fpfv/parallel.hpp"

namespace fpfv {

Quadrature Quadrature::gauss(int k) {
    if (k < 1 || k > 5) throw InvalidArgument("Gauss rule supports 1..5 points");
    return {Kind::Gauss, k};
}

std::string to_string(const Quadrature& q) {
    return q.kind == Quadrature::Kind::Midpoint ? "midpoint" : "gauss" + std::to_string(q.points);
}

Quadrature parse_quadrature(const std::string& name) {
    if (name == "midpoint") return Quadrature::midpoint();
    if (name.rfind("gauss", 0) == 0 && name.size() > 5) {
        try {
            return Quadrature::gauss(std::stoi(name.substr(5)));
        } catch (const std::logic_error&) {
        }
    }
    throw InvalidArgument("unknown quadrature '" + name + "'");
}

GaussRule gauss_legendre(int k) {
    switch (k) {
        case 1: return {{0.0}, {2.0}};
        case 2: {
            const double a = 1.0 / std::sqrt(3.0);
            return {{-a, a}, {1.0, 1.0}};
        }
        case 3: {
            const double a = std::sqrt(3.0 / 5.0);
            return {{-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
        }
        case 4: {
            const double r = std::sqrt(6.0 / 5.0);
            const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * r);
            const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * r);
            const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
            const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
            return {{-b, -a, a, b}, {wb, wa, wa, wb}};
        }
        case 5: {
            const double r = 2.0 * std::sqrt(10.0 / 7.0);
            const double a = std::sqrt(5.0 - r) / 3.0;
            const double b = std::sqrt(5.0 + r) / 3.0;
            const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
            const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
            return {{-b, -a, 0.0, a, b}, {wb, wa, 128.0 / 225.0, wa, wb}};
        }
        default: throw InvalidArgument("Gauss rule supports 1..5 points");
    }
}

namespace {

// max |sin x| over [a, b]
double max_abs_sin(double a, double b) {
    const double pi = std::numbers::pi;
    const double first = std::ceil((a - pi / 2) / pi);
    if (pi / 2 + first * pi <= b) return 1.0;
    return std::max(std::abs(std::sin(a)), std::abs(std::sin(b)));
}

}  // namespace

VelocityField pendulum_field(double g_over_l, std::optional<BoxDomain> box) {
    if (!(g_over_l > 0.0)) throw InvalidArgument("g/l must be positive");
    const double pi = std::numbers::pi;
    const BoxDomain b = box.value_or(BoxDomain{{-pi, -pi}, {pi, pi}});
    if (b.dim() != 2) throw InvalidArgument("pendulum field is two-dimensional");

    const double vmax1 = std::max(std::abs(b.lower[1]), std::abs(b.upper[1]));
    const double vmax2 = g_over_l * max_abs_sin(b.lower[0], b.upper[0]);

    VelocityField f;
    f.dim = 2;
    f.eval = [g_over_l](const Point& x) { return Point{x[1], -g_over_l * std::sin(x[0]), 0.0}; };
    f.divergence_free = true;
    f.sup_norm_bound = std::hypot(vmax1, vmax2);
    f.component_bounds = std::vector<double>{vmax1, vmax2};
    f.name = "pendulum";
    return f;
}

VelocityField constant_field(std::vector<double> c) {
    if (c.empty() || c.size() > kMaxDim) throw InvalidArgument("constant field needs 1..3 components");
    VelocityField f;
    f.dim = c.size();
    Point value{};
    double norm2 = 0.0;
    std::vector<double> bounds;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!std::isfinite(c[i])) throw NonFiniteValue("constant field component is not finite");
        value[i] = c[i];
        norm2 += c[i] * c[i];
        bounds.push_back(std::abs(c[i]));
    }
    f.eval = [value](const Point&) { return value; };
    f.divergence_free = true;
    f.sup_norm_bound = std::sqrt(norm2);
    f.component_bounds = std::move(bounds);
    f.name = "constant";
    return f;
}

VelocityField rotation_field() {
    VelocityField f;
    f.dim = 2;
    f.eval = [](const Point& x) { return Point{-x[1], x[0], 0.0}; };
    f.divergence_free = true;
    f.name = "rotation";
    return f;
}

VelocityField zero_field(std::size_t dim) {
    VelocityField f = constant_field(std::vector<double>(dim, 0.0));
    f.name = "zero";
    return f;
}

VelocityField field_from_name(const std::string& name, const BoxDomain& box, double g_over_l) {
    if (name == "pendulum") return pendulum_field(g_over_l, box);
    if (name == "zero") return zero_field(box.dim());
    if (name == "rotation") {
        VelocityField f = rotation_field();
        if (box.dim() != 2) throw InvalidArgument("rotation field is two-dimensional");
        const double r1 = std::max(std::abs(box.lower[1]), std::abs(box.upper[1]));
        const double r0 = std::max(std::abs(box.lower[0]), std::abs(box.upper[0]));
        f.component_bounds = std::vector<double>{r1, r0};
        f.sup_norm_bound = std::hypot(r0, r1);
        return f;
    }
    if (name.rfind("constant:", 0) == 0) {
        std::vector<double> c;
        std::stringstream ss(name.substr(9));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                c.push_back(std::stod(item, &used));
                if (used != item.size()) throw InvalidArgument("bad number");
            } catch (const std::exception&) {
                throw InvalidArgument("bad constant field component '" + item + "'");
            }
        }
        if (c.size() != box.dim()) throw InvalidArgument("constant field dimension does not match domain");
        return constant_field(std::move(c));
    }
    throw InvalidArgument("unknown velocity field '" + name + "'");
}

double estimate_sup_norm(const VelocityField& field, const Grid& grid) {
    double vmax = 0.0;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const Point v = field.eval(grid.midpoint(c));
        double n2 = 0.0;
        for (std::size_t i = 0; i < grid.dim(); ++i) n2 += v[i] * v[i];
        vmax = std::max(vmax, std::sqrt(n2));
    }
    return 1.1 * vmax;
}

EdgeFluxes compute_fluxes(const VelocityField& field, const Grid& grid, Quadrature quadrature) {
    if (field.dim != grid.dim()) throw InvalidArgument("velocity field and grid dimensions differ");
    const auto edges = grid.edges();
    EdgeFluxes out;
    out.quadrature = quadrature;
    out.flux.assign(edges.size(), 0.0);

    const std::size_t d = grid.dim();
    const auto h = grid.spacing();
    GaussRule rule;
    if (quadrature.kind == Quadrature::Kind::Gauss) rule = gauss_legendre(quadrature.points);

    parallel_for(edges.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t e = begin; e < end; ++e) {
            const Edge& edge = edges[e];
            double normal_velocity = 0.0;
            if (quadrature.kind == Quadrature::Kind::Midpoint || d == 1) {
                normal_velocity = field.eval(edge.midpoint)[edge.axis];
            } else {
                // Tensor rule over the d-1 transverse axes; weights average to 1.
                std::array<std::size_t, kMaxDim> transverse{};
                std::size_t nt = 0;
                for (std::size_t j = 0; j < d; ++j)
                    if (j != edge.axis) transverse[nt++] = j;
                const std::size_t k = rule.nodes.size();
                std::size_t total = 1;
                for (std::size_t t = 0; t < nt; ++t) total *= k;
                for (std::size_t q = 0; q < total; ++q) {
                    Point x = edge.midpoint;
                    double w = 1.0;
                    std::size_t rem = q;
                    for (std::size_t t = 0; t < nt; ++t) {
                        const std::size_t node = rem % k;
                        rem /= k;
                        x[transverse[t]] += 0.5 * h[transverse[t]] * rule.nodes[node];
                        w *= 0.5 * rule.weights[node];
                    }
                    normal_velocity += w * field.eval(x)[edge.axis];
                }
            }
            const double value = edge.normal_a * normal_velocity * edge.measure;
            if (!std::isfinite(value)) throw NonFiniteValue("non-finite velocity on edge " + std::to_string(e));
            out.flux[e] = value;
        }
    });
    return out;
}

std::vector<double> discrete_divergence(const EdgeFluxes& fluxes, const Grid& grid) {
    if (fluxes.flux.size() != grid.edges().size()) throw GridMismatch("flux count does not match grid edges");
    std::vector<double> div(grid.cell_count(), 0.0);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        double s = 0.0;
        for (const Neighbor& nb : grid.neighbors(c)) s += fluxes.outward(nb.edge, nb.orientation);
        div[c] = s;
    }
    return div;
}

}  // namespace fpfv
