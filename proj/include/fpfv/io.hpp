#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fpfv/density.hpp"
#include "fpfv/filter.hpp"

namespace fpfv {

/// Header-plus-values density file: "# d=", "# n=", "# domain=", "# t=" lines
/// followed by one value per line in canonical cell order, 17 significant digits.
struct DensitySnapshot {
    BoxDomain domain;
    std::vector<std::size_t> counts;
    double time = 0.0;
    std::vector<double> values;

    /// Binds the values to a grid with the given boundary kinds.
    Density to_density(std::vector<Boundary> bc) const;
};

void write_density(std::ostream& out, const Density& density, double time);
DensitySnapshot read_density(std::istream& in);

void write_density_file(const std::string& path, const Density& density, double time);
DensitySnapshot read_density_file(const std::string& path);

/// "t,z" header followed by one row per observation.
void write_observations(std::ostream& out, const ObservationSequence& obs);
ObservationSequence read_observations(std::istream& in);

/// t, mean_1..mean_d, std_1..std_d, mode_count_axis1, log_evidence.
void write_run_report(std::ostream& out, const std::vector<HistoryRecord>& history);

/// %.17g
std::string format_double(double value);

}  // namespace fpfv
