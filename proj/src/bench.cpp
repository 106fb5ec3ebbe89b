#include "fpfv/bench.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <ostream>

#include "fpfv/errors.hpp"
#include "fpfv/transition.hpp"

namespace fpfv {

void validate_levels(const std::vector<std::size_t>& n_list) {
    if (n_list.size() < 2) throw InvalidArgument("a convergence study needs at least two levels");
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
        if (n_list[i] < 2 || n_list[i + 1] <= n_list[i] || n_list[i + 1] % n_list[i] != 0)
            throw InvalidArgument("levels must increase and each must divide the next");
    }
}

double level_time_step(const StudySetup& setup, const Grid& grid) {
    double dt = 0.0;
    if (setup.rule == StepRule::Simplified) {
        dt = simplified_cfl_dt(setup.field, grid, setup.xi);
    } else {
        const EdgeFluxes fluxes = compute_fluxes(setup.field, grid, setup.flux_quadrature);
        dt = max_stable_dt(fluxes, grid, setup.xi).dt_max;
    }
    dt *= setup.dt_scale;
    if (setup.t_final > 0.0 && std::isfinite(dt)) dt = setup.t_final / std::ceil(setup.t_final / dt);
    if (!std::isfinite(dt)) dt = setup.t_final > 0.0 ? setup.t_final : 1.0;
    return dt;
}

LevelResult run_level(const StudySetup& setup, std::size_t n) {
    std::vector<std::size_t> counts(setup.domain.dim(), n);
    GridPtr grid = build_grid(setup.domain, counts, setup.bc);
    Density p0 = project(setup.prior, grid, setup.projection);
    if (setup.normalize_prior) p0 = normalize(p0);

    LevelResult level;
    level.n = n;
    level.h = grid->max_spacing();
    level.dt = level_time_step(setup, *grid);
    level.initial_mass = p0.mass();

    const EdgeFluxes fluxes = compute_fluxes(setup.field, *grid, setup.flux_quadrature);
    const TransitionOperator op = assemble(fluxes, grid, level.dt);
    level.steps = steps_until(setup.t_final, level.dt);
    level.density = evolve(op, p0, setup.t_final);
    level.final_mass = level.density.mass();
    level.min_value = level.density.min_value();
    return level;
}

ConvergenceResult convergence_study(const StudySetup& setup) {
    validate_levels(setup.n_list);
    ConvergenceResult result;
    for (std::size_t n : setup.n_list) result.levels.push_back(run_level(setup, n));
    for (std::size_t i = 0; i + 1 < result.levels.size(); ++i) {
        ConvergenceRow row;
        row.n = result.levels[i].n;
        row.l1_diff = l1_distance(result.levels[i].density, result.levels[i + 1].density);
        if (i > 0 && row.l1_diff > 0.0 && result.rows.back().l1_diff > 0.0)
            row.effective_order = -std::log2(row.l1_diff / result.rows.back().l1_diff);
        result.rows.push_back(row);
    }
    return result;
}

ExpectationStudy expectation_convergence(const StudySetup& setup, const Observable& g) {
    validate_levels(setup.n_list);
    ExpectationStudy study;
    for (std::size_t n : setup.n_list) {
        const LevelResult level = run_level(setup, n);
        study.levels.push_back({n, expectation(level.density, g)});
    }
    for (std::size_t i = 0; i + 1 < study.levels.size(); ++i)
        study.differences.push_back(std::abs(study.levels[i + 1].value - study.levels[i].value));
    study.monotone = true;
    study.min_order = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < study.differences.size(); ++i) {
        if (!(study.differences[i + 1] < study.differences[i])) study.monotone = false;
        const double order = (study.differences[i] > 0.0 && study.differences[i + 1] > 0.0)
                                 ? -std::log2(study.differences[i + 1] / study.differences[i])
                                 : std::numeric_limits<double>::quiet_NaN();
        study.orders.push_back(order);
        if (!(order >= study.min_order)) study.min_order = order;
    }
    study.rate_at_least_half = !study.orders.empty() && study.min_order >= 0.5;
    return study;
}

void write_convergence_csv(std::ostream& out, const ConvergenceResult& result) {
    out << "n,l1_diff,effective_order\n";
    char buf[128];
    for (const auto& row : result.rows) {
        if (row.effective_order)
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", row.n, row.l1_diff, *row.effective_order);
        else
            std::snprintf(buf, sizeof buf, "%zu,%.17g,\n", row.n, row.l1_diff);
        out << buf;
    }
}

void write_convergence_table(std::ostream& out, const ConvergenceResult& result) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%8s | %14s | %15s\n", "N", "L1 Norm", "Effective order");
    out << buf << std::string(43, '-') << '\n';
    for (const auto& row : result.rows) {
        if (row.effective_order)
            std::snprintf(buf, sizeof buf, "%8zu | %14.5g | %15.4f\n", row.n, row.l1_diff, *row.effective_order);
        else
            std::snprintf(buf, sizeof buf, "%8zu | %14.5g | %15s\n", row.n, row.l1_diff, "-");
        out << buf;
    }
    if (!result.levels.empty()) {
        std::snprintf(buf, sizeof buf, "%8zu | %14s | %15s\n", result.levels.back().n, "-", "-");
        out << buf;
    }
}

}  // namespace fpfv
