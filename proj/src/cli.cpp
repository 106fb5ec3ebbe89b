#include "fpfv/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "fpfv/bench.hpp"
#include "fpfv/density.hpp"
#include "fpfv/errors.hpp"
#include "fpfv/filter.hpp"
#include "fpfv/io.hpp"
#include "fpfv/parallel.hpp"
#include "fpfv/transition.hpp"

namespace fpfv {

namespace fs = std::filesystem;

namespace {

GridPtr config_grid(const RunConfig& c) {
    if (c.n.size() != c.domain.dim() || c.bc.size() != c.domain.dim())
        throw ConfigError("domain, n and bc must have the same dimension");
    return build_grid(c.domain, c.n, c.bc);
}

VelocityField config_field(const RunConfig& c) { return field_from_name(c.field, c.domain, c.g_over_l); }

double config_dt(const RunConfig& c, const VelocityField& field, const Grid& grid, const EdgeFluxes& fluxes) {
    if (c.dt) {
        if (!(*c.dt > 0.0)) throw ConfigError("dt must be positive");
        return *c.dt;
    }
    double dt = c.dt_rule == StepRule::Simplified ? simplified_cfl_dt(field, grid, c.xi)
                                                  : max_stable_dt(fluxes, grid, c.xi).dt_max;
    // A field without outflow admits any step; S = I either way.
    if (!std::isfinite(dt)) dt = 1.0;
    return dt;
}

Pdf config_prior_pdf(const RunConfig& c) {
    if (c.prior != "gaussian") throw ConfigError("only gaussian priors have a closed-form pdf");
    if (c.prior_mean.size() != c.domain.dim()) throw ConfigError("prior_mean dimension does not match the domain");
    return gaussian_pdf(c.prior_mean, c.prior_cov);
}

Density config_prior(const RunConfig& c, const GridPtr& grid) {
    Density prior;
    if (c.prior == "gaussian") {
        prior = project(config_prior_pdf(c), grid, c.quadrature);
    } else if (c.prior == "uniform") {
        prior = Density::uniform(grid);
    } else if (c.prior == "file") {
        const DensitySnapshot snap = read_density_file(c.prior_file);
        if (!(snap.domain == grid->domain()) || snap.counts != std::vector<std::size_t>(grid->counts().begin(), grid->counts().end()))
            throw ConfigError("prior file does not match the configured grid");
        prior = Density(grid, snap.values);
    } else {
        throw ConfigError("prior must be gaussian, uniform or file");
    }
    return c.normalize_prior ? normalize(prior) : prior;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const RunConfig& c, const std::string& name) {
    std::ofstream out(fs::path(c.out) / name);
    if (!out) throw ConfigError("cannot write '" + (fs::path(c.out) / name).string() + "'");
    return out;
}

}  // namespace

int cmd_operator(const RunConfig& config, std::ostream& log) {
    set_thread_count(config.threads);
    const GridPtr grid = config_grid(config);
    const VelocityField field = config_field(config);
    const EdgeFluxes fluxes = compute_fluxes(field, *grid, config.quadrature);
    const CflReport cfl = max_stable_dt(fluxes, *grid, config.xi);
    const double dt = config_dt(config, field, *grid, fluxes);

    log << "cells " << grid->cell_count() << ", edges " << grid->edges().size() << '\n';
    log << "cfl: xi=" << format_double(cfl.xi) << " dt_max="
        << (cfl.unbounded() ? std::string("unbounded") : format_double(cfl.dt_max))
        << " binding_cell=" << cfl.binding_cell << '\n';
    log << "dt=" << format_double(dt) << '\n';

    const TransitionOperator op = assemble(fluxes, grid, dt);
    const MarkovReport markov = verify_markov(op, config.markov_tol);
    log << "markov: min_entry=" << format_double(markov.min_entry)
        << " max_row_sum_error=" << format_double(markov.max_row_sum_error)
        << " is_markov=" << (markov.is_markov ? "true" : "false") << '\n';

    if (config.stationary || !config.export_operator.empty()) ensure_dir(config.out);
    if (!config.export_operator.empty()) {
        auto out = open_out(config, config.export_operator);
        write_triplets(out, op);
    }
    if (config.stationary) {
        try {
            const StationaryResult st = stationary(op, config.stationary_tol, config.stationary_max_iter);
            auto out = open_out(config, "stationary.csv");
            write_density(out, st.density, 0.0);
            log << "stationary: converged after " << st.iterations << " iterations (residual "
                << format_double(st.residual) << ")\n";
        } catch (const NoConvergence& e) {
            log << "stationary: " << e.what() << '\n';
        }
    }
    return markov.is_markov ? exit_code::ok : exit_code::not_markov;
}

int cmd_converge(const RunConfig& config, std::ostream& log) {
    set_thread_count(config.threads);
    validate_levels(config.n_list);
    if (config.t_final < 0.0) throw ConfigError("t_final must be non-negative");
    if (config.bc.size() != config.domain.dim()) throw ConfigError("bc dimension does not match the domain");

    StudySetup setup;
    setup.field = config_field(config);
    setup.domain = config.domain;
    setup.bc = config.bc;
    setup.prior = config_prior_pdf(config);
    setup.t_final = config.t_final;
    setup.n_list = config.n_list;
    setup.xi = config.xi;
    setup.rule = config.dt_rule;
    setup.projection = config.quadrature;
    setup.normalize_prior = config.normalize_prior;

    const ConvergenceResult result = convergence_study(setup);
    ensure_dir(config.out);
    {
        auto csv = open_out(config, "convergence.csv");
        write_convergence_csv(csv, result);
        auto txt = open_out(config, "convergence.txt");
        write_convergence_table(txt, result);
    }
    for (const auto& level : result.levels)
        log << "level n=" << level.n << " dt=" << format_double(level.dt) << " steps=" << level.steps
            << " mass=" << format_double(level.final_mass) << '\n';
    write_convergence_table(log, result);
    return exit_code::ok;
}

int cmd_filter(const RunConfig& config, std::ostream& log) {
    set_thread_count(config.threads);
    const GridPtr grid = config_grid(config);
    const VelocityField field = config_field(config);
    const EdgeFluxes fluxes = compute_fluxes(field, *grid, config.quadrature);
    const double dt = config_dt(config, field, *grid, fluxes);
    const TransitionOperator op = assemble(fluxes, grid, dt);

    RunConfig prior_config = config;
    prior_config.normalize_prior = true;
    const Density prior = config_prior(prior_config, grid);

    ObservationSequence obs;
    std::vector<Point> truth;
    if (config.observations == "file") {
        std::ifstream in(config.obs_file);
        if (!in) throw ConfigError("cannot open observation file '" + config.obs_file + "'");
        obs = read_observations(in);
    } else if (config.observations == "synthesize") {
        if (config.truth_x0.size() != grid->dim()) throw ConfigError("truth_x0 dimension does not match the domain");
        Point x0{};
        std::copy(config.truth_x0.begin(), config.truth_x0.end(), x0.begin());
        TruthOptions options;
        options.wrap = grid.get();
        truth = simulate_truth(field, x0, config.obs_times, options);
        obs = synthesize_observations(truth, config.obs_times, config.sigma, config.seed);
    } else if (config.observations != "none") {
        throw ConfigError("observations must be none, file or synthesize");
    }

    const ObservationModel model = gaussian_abs_position_model(config.sigma);
    const FilterRun run = run_filter(prior, op, model, obs, config.t_end, config.snapshot_times);

    ensure_dir(config.out);
    {
        auto report = open_out(config, "report.csv");
        write_run_report(report, run.state.history);
    }
    if (config.observations == "synthesize") {
        auto out = open_out(config, "observations.csv");
        write_observations(out, obs);
        auto tr = open_out(config, "truth.csv");
        tr << 't';
        for (std::size_t i = 0; i < grid->dim(); ++i) tr << ",x_" << i + 1;
        tr << '\n';
        for (std::size_t k = 0; k < truth.size(); ++k) {
            tr << format_double(config.obs_times[k]);
            for (std::size_t i = 0; i < grid->dim(); ++i) tr << ',' << format_double(truth[k][i]);
            tr << '\n';
        }
    }
    for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%03zu.csv", i);
        auto out = open_out(config, name);
        write_density(out, run.snapshots[i].second, run.snapshots[i].first.snapped);
    }
    {
        auto summary = open_out(config, "run_summary.txt");
        summary << "dt=" << format_double(dt) << '\n';
        summary << "steps=" << run.state.step_index << '\n';
        summary << "log_evidence=" << format_double(run.state.log_evidence) << '\n';
        for (const auto& s : run.observation_snaps)
            summary << "observation t=" << format_double(s.requested) << " snapped=" << format_double(s.snapped)
                    << " snap_distance=" << format_double(s.snapped - s.requested) << '\n';
        for (const auto& [s, _] : run.snapshots)
            summary << "snapshot t=" << format_double(s.requested) << " snapped=" << format_double(s.snapped)
                    << " snap_distance=" << format_double(s.snapped - s.requested) << '\n';
    }
    log << "filter: " << obs.size() << " observations, " << run.state.step_index << " steps, dt=" << format_double(dt)
        << ", log_evidence=" << format_double(run.state.log_evidence) << '\n';
    return exit_code::ok;
}

}  // namespace fpfv
