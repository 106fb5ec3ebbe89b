#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fpfv/config.hpp"

namespace fpfv {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int not_markov = 1;
inline constexpr int config = 2;
inline constexpr int cfl = 3;
inline constexpr int zero_evidence = 4;
}  // namespace exit_code

/// Assembles the operator, prints CFL and Markov reports, optionally writes
/// the stationary density and a triplet export. Exit 0 iff the operator is Markov.
int cmd_operator(const RunConfig& config, std::ostream& log);

/// Convergence table: convergence.csv and convergence.txt in the output directory.
int cmd_converge(const RunConfig& config, std::ostream& log);

/// Filtering run: report.csv, snapshot_<k>.csv, observations.csv, truth.csv
/// (when synthesised) and run_summary.txt.
int cmd_filter(const RunConfig& config, std::ostream& log);

/// Full command line: "<command> [--config path] [--out dir] [--seed n]
/// [--threads n] [--<key> value]...". Errors go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& log, std::ostream& err);

}  // namespace fpfv
