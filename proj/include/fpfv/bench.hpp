#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fpfv/density.hpp"
#include "fpfv/grid.hpp"
#include "fpfv/velocity.hpp"

namespace fpfv {

/// How the time step of each refinement level is chosen.
enum class StepRule {
    Simplified,  // (1 - xi) / sum_i (sup|v_i| / h_i)
    Cfl,         // max_stable_dt from the assembled fluxes
};

struct StudySetup {
    VelocityField field;
    BoxDomain domain;
    std::vector<Boundary> bc;
    Pdf prior;
    double t_final = 0.0;
    std::vector<std::size_t> n_list;  // cells per axis at each level
    double xi = 0.0;
    StepRule rule = StepRule::Simplified;
    Quadrature projection = Quadrature::midpoint();
    Quadrature flux_quadrature = Quadrature::midpoint();
    bool normalize_prior = false;
    double dt_scale = 1.0;  // multiplies the rule's dt before it is fitted to t_final
};

/// One refinement level after evolution to t_final.
struct LevelResult {
    std::size_t n = 0;
    double h = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
    double initial_mass = 0.0;
    double final_mass = 0.0;
    double min_value = 0.0;
    Density density;
};

struct ConvergenceRow {
    std::size_t n = 0;
    double l1_diff = 0.0;                   // || p_n - p_2n ||_L1
    std::optional<double> effective_order;  // -log2(this l1_diff / previous l1_diff)
};

struct ConvergenceResult {
    std::vector<LevelResult> levels;
    std::vector<ConvergenceRow> rows;
};

/// Validates n_list: strictly increasing, each entry dividing the next.
void validate_levels(const std::vector<std::size_t>& n_list);

/// Time step used at one level, reduced so that t_final is an exact multiple.
double level_time_step(const StudySetup& setup, const Grid& grid);

LevelResult run_level(const StudySetup& setup, std::size_t n);

/// For consecutive levels (n, n'), records ||p_n - p_n'||; row i > 0 carries
/// the effective order -log2(l1_diff[i] / l1_diff[i-1]).
ConvergenceResult convergence_study(const StudySetup& setup);

struct ExpectationLevel {
    std::size_t n = 0;
    double value = 0.0;
};

struct ExpectationStudy {
    std::vector<ExpectationLevel> levels;
    std::vector<double> differences;  // |E_{i+1} - E_i|
    std::vector<double> orders;       // -log2(differences[i+1] / differences[i])
    bool monotone = false;            // differences strictly decreasing
    double min_order = 0.0;
    bool rate_at_least_half = false;
};

ExpectationStudy expectation_convergence(const StudySetup& setup, const Observable& g);

/// "n,l1_diff,effective_order" with 17 significant digits; the order column
/// is empty on the first row.
void write_convergence_csv(std::ostream& out, const ConvergenceResult& result);

/// Aligned text table with an N / L1 Norm / Effective order layout.
void write_convergence_table(std::ostream& out, const ConvergenceResult& result);

}  // namespace fpfv
