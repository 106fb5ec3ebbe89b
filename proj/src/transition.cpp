#include "fpfv/transition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "fpfv/errors.hpp"
#include "fpfv/parallel.hpp"

namespace fpfv {

namespace {

std::vector<double> positive_outflow(const EdgeFluxes& fluxes, const Grid& grid) {
    if (fluxes.flux.size() != grid.edges().size()) throw GridMismatch("flux count does not match grid edges");
    std::vector<double> out(grid.cell_count(), 0.0);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        double s = 0.0;
        for (const Neighbor& nb : grid.neighbors(c)) s += std::max(0.0, fluxes.outward(nb.edge, nb.orientation));
        out[c] = s;
    }
    return out;
}

SparseRows transpose(const SparseRows& a, std::size_t cols) {
    SparseRows t;
    t.offsets.assign(cols + 1, 0);
    for (std::size_t c : a.columns) ++t.offsets[c + 1];
    for (std::size_t i = 0; i < cols; ++i) t.offsets[i + 1] += t.offsets[i];
    t.columns.resize(a.columns.size());
    t.values.resize(a.values.size());
    std::vector<std::size_t> cursor(t.offsets.begin(), t.offsets.end() - 1);
    // Rows are visited in ascending order, so each transposed row is sorted.
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = a.offsets[r]; k < a.offsets[r + 1]; ++k) {
            const std::size_t pos = cursor[a.columns[k]]++;
            t.columns[pos] = r;
            t.values[pos] = a.values[k];
        }
    }
    return t;
}

}  // namespace

double SparseRows::at(std::size_t row, std::size_t col) const {
    const auto begin = columns.begin() + static_cast<std::ptrdiff_t>(offsets[row]);
    const auto end = columns.begin() + static_cast<std::ptrdiff_t>(offsets[row + 1]);
    const auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) return 0.0;
    return values[static_cast<std::size_t>(it - columns.begin())];
}

CflReport max_stable_dt(const EdgeFluxes& fluxes, const Grid& grid, double xi) {
    if (!(xi >= 0.0 && xi < 1.0)) throw InvalidArgument("xi must lie in [0, 1)");
    const auto outflow = positive_outflow(fluxes, grid);
    CflReport report;
    report.xi = xi;
    const auto it = std::max_element(outflow.begin(), outflow.end());
    if (it == outflow.end() || *it <= 0.0) return report;
    report.binding_cell = static_cast<std::size_t>(it - outflow.begin());
    report.max_outflow = *it;
    report.dt_max = (1.0 - xi) * grid.cell_measure() / *it;
    return report;
}

double simplified_cfl_dt(const VelocityField& field, const Grid& grid, double xi) {
    if (!(xi >= 0.0 && xi < 1.0)) throw InvalidArgument("xi must lie in [0, 1)");
    std::vector<double> bounds;
    if (field.component_bounds) bounds = *field.component_bounds;
    else if (field.sup_norm_bound) bounds.assign(grid.dim(), *field.sup_norm_bound);
    else bounds.assign(grid.dim(), estimate_sup_norm(field, grid));
    if (bounds.size() != grid.dim()) throw InvalidArgument("component bound count does not match dimension");
    double rate = 0.0;
    for (std::size_t i = 0; i < grid.dim(); ++i) rate += bounds[i] / grid.spacing()[i];
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return (1.0 - xi) / rate;
}

TransitionOperator assemble_unchecked(const EdgeFluxes& fluxes, GridPtr grid_ptr, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive and finite");
    const Grid& grid = *grid_ptr;
    if (fluxes.flux.size() != grid.edges().size()) throw GridMismatch("flux count does not match grid edges");

    TransitionOperator op;
    op.grid_ = grid_ptr;
    op.dt_ = dt;

    const double scale = dt / grid.cell_measure();
    SparseRows& s = op.rows_;
    s.offsets.reserve(grid.cell_count() + 1);
    s.offsets.push_back(0);
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t k = 0; k < grid.cell_count(); ++k) {
        row.clear();
        double outflow = 0.0;
        for (const Neighbor& nb : grid.neighbors(k)) {
            const double v = fluxes.outward(nb.edge, nb.orientation);
            if (v <= 0.0) continue;  // inflow is recorded on the donor's row
            outflow += v;
            if (!nb.cell) {
                op.mass_conserving_ = false;
                continue;
            }
            auto it = std::find_if(row.begin(), row.end(), [&](const auto& e) { return e.first == *nb.cell; });
            if (it == row.end()) row.emplace_back(*nb.cell, v);
            else it->second += v;  // several faces towards the same cell
        }
        for (auto& e : row) e.second *= scale;
        row.emplace_back(k, 1.0 - scale * outflow);
        std::sort(row.begin(), row.end());
        for (const auto& [col, value] : row) {
            s.columns.push_back(col);
            s.values.push_back(value);
        }
        s.offsets.push_back(s.columns.size());
    }
    op.columns_ = transpose(s, grid.cell_count());
    return op;
}

TransitionOperator assemble(const EdgeFluxes& fluxes, GridPtr grid, double dt) {
    TransitionOperator op = assemble_unchecked(fluxes, grid, dt);
    const SparseRows& s = op.rows();
    for (std::size_t k = 0; k < s.rows(); ++k) {
        if (s.at(k, k) < 0.0) {
            const CflReport cfl = max_stable_dt(fluxes, op.grid(), 0.0);
            throw CflViolation(cfl.binding_cell, dt, cfl.dt_max);
        }
    }
    return op;
}

std::vector<double> TransitionOperator::apply(std::span<const double> masses) const {
    if (masses.size() != grid_->cell_count()) throw GridMismatch("mass vector does not match operator size");
    std::vector<double> out(masses.size());
    const SparseRows& t = columns_;
    parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t dest = begin; dest < end; ++dest) {
            double acc = 0.0;
            for (std::size_t k = t.offsets[dest]; k < t.offsets[dest + 1]; ++k) acc += masses[t.columns[k]] * t.values[k];
            out[dest] = acc;
        }
    });
    return out;
}

Density step(const TransitionOperator& op, const Density& density) {
    if (density.grid_ptr() != op.grid_ptr() && !density.grid().same_layout(op.grid()))
        throw GridMismatch("density and operator live on different grids");
    const auto next = op.apply(density.mass_vector());
    return Density::from_masses(op.grid_ptr(), next);
}

std::size_t steps_until(double t, double dt) {
    if (!(t >= 0.0)) throw InvalidArgument("time must be non-negative");
    return static_cast<std::size_t>(std::floor(t / dt * (1.0 + 1e-9)));
}

Density evolve(const TransitionOperator& op, const Density& density, double t) {
    const std::size_t k = steps_until(t, op.dt());
    if (density.grid_ptr() != op.grid_ptr() && !density.grid().same_layout(op.grid()))
        throw GridMismatch("density and operator live on different grids");
    // same arithmetic as repeated step(), so the two agree bit for bit
    Density current = density;
    for (std::size_t i = 0; i < k; ++i) current = step(op, current);
    return current;
}

MarkovReport verify_markov(const TransitionOperator& op, double tol) {
    const SparseRows& s = op.rows();
    MarkovReport report;
    report.min_entry = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < s.rows(); ++r) {
        double sum = 0.0;
        for (std::size_t k = s.offsets[r]; k < s.offsets[r + 1]; ++k) {
            sum += s.values[k];
            report.min_entry = std::min(report.min_entry, s.values[k]);
        }
        report.max_row_sum_error = std::max(report.max_row_sum_error, std::abs(sum - 1.0));
    }
    report.is_markov = report.min_entry >= -tol && report.max_row_sum_error <= tol;
    return report;
}

StationaryResult stationary(const TransitionOperator& op, double tol, std::size_t max_iter) {
    if (!op.mass_conserving()) throw InvalidArgument("stationary distribution needs a mass-conserving operator");
    const Grid& grid = op.grid();
    std::vector<double> m(grid.cell_count(), grid.cell_measure() / grid.domain().volume());
    double residual = std::numeric_limits<double>::infinity();
    for (std::size_t it = 1; it <= max_iter; ++it) {
        std::vector<double> next = op.apply(m);
        residual = parallel_sum(m.size(), [&](std::size_t i) { return std::abs(next[i] - m[i]); });
        m = std::move(next);
        if (residual < tol) {
            StationaryResult result{normalize(Density::from_masses(op.grid_ptr(), m)), it, residual};
            return result;
        }
    }
    throw NoConvergence(max_iter, residual);
}

void write_triplets(std::ostream& out, const TransitionOperator& op) {
    const SparseRows& s = op.rows();
    char buf[96];
    std::snprintf(buf, sizeof buf, "# cells=%zu dt=%.17g\n", s.rows(), op.dt());
    out << buf;
    for (std::size_t r = 0; r < s.rows(); ++r) {
        for (std::size_t k = s.offsets[r]; k < s.offsets[r + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", r, s.columns[k], s.values[k]);
            out << buf;
        }
    }
}

}  // namespace fpfv
