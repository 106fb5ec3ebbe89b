#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpfv/bench.hpp"
#include "fpfv/grid.hpp"
#include "fpfv/velocity.hpp"

namespace fpfv {

enum class Command { Operator, Converge, Filter };

/// Everything a CLI run needs. Built from command defaults, then a flat
/// key=value file, then per-key overrides.
struct RunConfig {
    std::string field = "pendulum";
    double g_over_l = 1.0;
    BoxDomain domain;
    std::vector<std::size_t> n;
    std::vector<Boundary> bc;
    double xi = 0.0;
    StepRule dt_rule = StepRule::Simplified;
    std::optional<double> dt;  // forces the step, bypassing dt_rule
    Quadrature quadrature;

    std::string prior = "gaussian";  // gaussian | uniform | file
    std::vector<double> prior_mean;
    std::vector<double> prior_cov;  // scalar (times identity) or d x d
    std::string prior_file;
    bool normalize_prior = true;

    std::string observations = "synthesize";  // none | file | synthesize
    std::string obs_file;
    std::vector<double> truth_x0;
    std::vector<double> obs_times;
    double sigma = 0.1;
    std::uint64_t seed = 0;
    double t_end = 0.0;
    std::vector<double> snapshot_times;

    double markov_tol = 1e-12;
    bool stationary = false;
    double stationary_tol = 1e-10;
    std::size_t stationary_max_iter = 100000;
    std::string export_operator;

    std::vector<std::size_t> n_list;
    double t_final = 0.0;

    std::string out = "out";
    std::size_t threads = 1;
};

RunConfig default_config(Command command);

/// Keys accepted in config files and as --key overrides.
const std::vector<std::string>& config_keys();

/// Applies one key. Throws ConfigError for unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Applies every "key = value" line; '#' starts a comment.
void apply_config_text(RunConfig& config, const std::string& text);
void apply_config_file(RunConfig& config, const std::string& path);

/// Scalar with optional multiples of pi: "0.25", "-pi", "0.6pi", "2pi/7", "3*pi/4".
double parse_scalar(const std::string& text);

}  // namespace fpfv
