#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fpfv/grid.hpp"
#include "fpfv/velocity.hpp"

namespace fpfv {

/// Piecewise-constant density: one cell average p_K per grid cell.
/// Total mass is sum_K |K| p_K.
class Density {
public:
    Density() = default;
    Density(GridPtr grid, std::vector<double> values);

    static Density zeros(GridPtr grid);
    static Density uniform(GridPtr grid);  // mass 1
    /// Inverse of mass_vector(): values m_K / |K|.
    static Density from_masses(GridPtr grid, std::span<const double> masses);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::vector<double>& mutable_values() noexcept { return values_; }
    double operator[](std::size_t cell) const { return values_[cell]; }

    double mass() const;
    double min_value() const;
    /// Row vector {|K| p_K} acted on by the transition matrix.
    std::vector<double> mass_vector() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

using Pdf = std::function<double(const Point&)>;
using Observable = std::function<double(const Point&)>;

/// Cell averages of `pdf` by the given quadrature. Not normalised.
Density project(const Pdf& pdf, GridPtr grid, Quadrature quadrature = Quadrature::midpoint());

Density normalize(const Density& density);

/// Isotropic or full-covariance Gaussian pdf. `covariance` is row-major d x d.
Pdf gaussian_pdf(std::vector<double> mean, std::vector<double> covariance);

/// Piecewise-constant prolongation onto a grid refined by integer factors.
Density refine(const Density& density, const Grid& fine);

/// L1 distance sum_K |K| |a_K - b_K|, evaluated on the finer of the two
/// grids after exact prolongation of the coarser one.
double l1_distance(const Density& a, const Density& b);

/// sum_K |K| p_K g(x_K), g at cell midpoints.
double expectation(const Density& density, const Observable& g);

struct Moments {
    std::vector<double> mean;
    std::vector<double> covariance;  // row-major d x d
    double stddev(std::size_t axis) const;
};

/// Mean and covariance of the piecewise-constant reconstruction, taken
/// relative to the total mass. The within-cell variance h_i^2/12 is included
/// on the diagonal. Throws ZeroMass.
Moments moments(const Density& density);

/// Integrates out every axis but `axis`; the result lives on the 1D grid of
/// that axis with the same boundary kind.
Density marginal(const Density& density, std::size_t axis);

/// Number of modes of a 1D density. A local maximum counts when its
/// topographic prominence (height above the highest saddle linking it to a
/// taller peak) is at least min_prominence * max value. The global maximum
/// always counts; plateaus count once; periodic grids wrap.
int count_modes(const Density& marginal, double min_prominence);

/// Cell index under x -> -x on a grid symmetric about the origin.
std::size_t mirror_cell(const Grid& grid, std::size_t cell);

/// max_K |p_K - p_mirror(K)|.
double point_symmetry_defect(const Density& density);

}  // namespace fpfv
