#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "fpfv/density.hpp"
#include "fpfv/grid.hpp"
#include "fpfv/velocity.hpp"

namespace fpfv {

/// Largest admissible time step for dt * sum_L (v_KL)_+ <= (1 - xi) |K|.
struct CflReport {
    double dt_max = std::numeric_limits<double>::infinity();  // +inf when no cell has outflow
    double xi = 0.0;
    std::size_t binding_cell = 0;
    double max_outflow = 0.0;  // sum_L (v_KL)_+ at the binding cell

    bool unbounded() const noexcept { return dt_max == std::numeric_limits<double>::infinity(); }
};

CflReport max_stable_dt(const EdgeFluxes& fluxes, const Grid& grid, double xi);

/// dt = (1 - xi) / sum_i (sup|v_i| / h_i), the field-bound form of the CFL
/// condition. Needs field.component_bounds or field.sup_norm_bound.
double simplified_cfl_dt(const VelocityField& field, const Grid& grid, double xi);

/// Compressed sparse rows with sorted column indices.
struct SparseRows {
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> columns;
    std::vector<double> values;

    std::size_t rows() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::size_t nonzeros() const noexcept { return values.size(); }
    double at(std::size_t row, std::size_t col) const;
};

/// Sparse row-stochastic matrix S = I - dt A of the first-order upwind
/// scheme. It acts on mass row vectors m_K = |K| p_K from the right:
/// m^{k+1} = m^k S, i.e. row K lists where the mass of cell K goes.
/// Immutable after assembly.
class TransitionOperator {
public:
    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    double dt() const noexcept { return dt_; }
    bool mass_conserving() const noexcept { return mass_conserving_; }
    const SparseRows& rows() const noexcept { return rows_; }

    /// m S. Each destination entry sums its sources in ascending row order,
    /// so the result is independent of the thread count.
    std::vector<double> apply(std::span<const double> masses) const;

private:
    friend TransitionOperator assemble_unchecked(const EdgeFluxes&, GridPtr, double);

    GridPtr grid_;
    double dt_ = 0.0;
    bool mass_conserving_ = true;
    SparseRows rows_;
    SparseRows columns_;  // transpose of rows_, used by apply()
};

/// Assembles S and refuses time steps that make a diagonal entry negative
/// (throws CflViolation naming the binding cell).
TransitionOperator assemble(const EdgeFluxes& fluxes, GridPtr grid, double dt);

/// Same as assemble() without the CFL check; for counterexamples.
TransitionOperator assemble_unchecked(const EdgeFluxes& fluxes, GridPtr grid, double dt);

/// One time step.
Density step(const TransitionOperator& op, const Density& density);

/// Number of completed steps at time t: floor(t / dt), with a relative
/// slack of 1e-9 so that t = k dt computed in floating point yields k.
std::size_t steps_until(double t, double dt);

/// Density at time t under the piecewise-constant-in-time reconstruction.
Density evolve(const TransitionOperator& op, const Density& density, double t);

struct MarkovReport {
    double min_entry = 0.0;
    double max_row_sum_error = 0.0;
    bool is_markov = false;
};

MarkovReport verify_markov(const TransitionOperator& op, double tol);

struct StationaryResult {
    Density density;  // mass 1
    std::size_t iterations = 0;
    double residual = 0.0;  // L1 change of the last iteration
};

/// Power iteration m <- m S from the uniform density until the L1 change
/// drops below tol. Throws NoConvergence after max_iter iterations.
StationaryResult stationary(const TransitionOperator& op, double tol, std::size_t max_iter);

/// "# cells=<n> dt=<dt>" then "row col value" per stored entry.
void write_triplets(std::ostream& out, const TransitionOperator& op);

}  // namespace fpfv
