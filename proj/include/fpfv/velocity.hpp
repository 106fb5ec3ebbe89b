#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpfv/grid.hpp"

namespace fpfv {

/// Quadrature rule used for face fluxes and cell projections.
/// Gauss(k) is the k-point Gauss-Legendre rule per axis, tensorised.
struct Quadrature {
    enum class Kind { Midpoint, Gauss };
    Kind kind = Kind::Midpoint;
    int points = 1;

    static Quadrature midpoint() { return {}; }
    static Quadrature gauss(int k);

    bool operator==(const Quadrature&) const = default;
};

std::string to_string(const Quadrature& q);
Quadrature parse_quadrature(const std::string& name);

/// Gauss-Legendre nodes and weights on [-1, 1]; k in 1..5.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int k);

/// An autonomous velocity field dx/dt = v(x). `eval` must be a pure function.
struct VelocityField {
    std::size_t dim = 0;
    std::function<Point(const Point&)> eval;
    bool divergence_free = false;
    std::optional<double> sup_norm_bound;
    // Per-component bounds sup|v_i| on the domain; feeds the simplified CFL bound.
    std::optional<std::vector<double>> component_bounds;
    std::string name;
};

/// v(x) = (x2, -(g/l) sin x1). Bounds are computed on `box` (default [-pi,pi]^2).
VelocityField pendulum_field(double g_over_l, std::optional<BoxDomain> box = std::nullopt);
VelocityField constant_field(std::vector<double> c);
/// v(x) = (-x2, x1).
VelocityField rotation_field();
VelocityField zero_field(std::size_t dim);

/// "pendulum", "constant:<c1,c2,...>", "rotation" or "zero".
VelocityField field_from_name(const std::string& name, const BoxDomain& box, double g_over_l = 1.0);

/// 1.1 times the largest |v| over cell midpoints.
double estimate_sup_norm(const VelocityField& field, const Grid& grid);

/// One signed flux per grid edge, oriented along the edge's A-to-B normal.
/// The value seen from the B side is the negation, so v_KL = -v_LK holds by
/// construction.
struct EdgeFluxes {
    std::vector<double> flux;
    Quadrature quadrature;

    /// Flux out of the cell on the given side of `edge`.
    double outward(std::size_t edge, int orientation) const { return orientation * flux[edge]; }
};

EdgeFluxes compute_fluxes(const VelocityField& field, const Grid& grid,
                          Quadrature quadrature = Quadrature::midpoint());

/// Net outward flux of each cell.
std::vector<double> discrete_divergence(const EdgeFluxes& fluxes, const Grid& grid);

}  // namespace fpfv
