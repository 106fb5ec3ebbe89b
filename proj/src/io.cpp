#include "fpfv/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fpfv/errors.hpp"

namespace fpfv {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

double parse_number(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw InvalidArgument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("bad number '" + s + "'");
    }
}

}  // namespace

Density DensitySnapshot::to_density(std::vector<Boundary> bc) const {
    return Density(build_grid(domain, counts, std::move(bc)), values);
}

void write_density(std::ostream& out, const Density& density, double time) {
    const Grid& g = density.grid();
    out << "# d=" << g.dim() << '\n' << "# n=";
    for (std::size_t i = 0; i < g.dim(); ++i) out << (i ? "," : "") << g.counts()[i];
    out << '\n' << "# domain=";
    for (std::size_t i = 0; i < g.dim(); ++i)
        out << (i ? ";" : "") << format_double(g.domain().lower[i]) << ',' << format_double(g.domain().upper[i]);
    out << '\n' << "# t=" << format_double(time) << '\n';
    for (double v : density.values()) out << format_double(v) << '\n';
}

DensitySnapshot read_density(std::istream& in) {
    DensitySnapshot snap;
    std::size_t d = 0;
    bool have_d = false, have_n = false, have_domain = false, have_t = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw InvalidArgument("malformed header line '" + line + "'");
            const std::string key = line.substr(2, eq - 2);
            const std::string value = line.substr(eq + 1);
            if (key == "d") {
                d = static_cast<std::size_t>(parse_number(value));
                have_d = true;
            } else if (key == "n") {
                for (const auto& p : split(value, ',')) snap.counts.push_back(static_cast<std::size_t>(parse_number(p)));
                have_n = true;
            } else if (key == "domain") {
                for (const auto& axis : split(value, ';')) {
                    const auto lu = split(axis, ',');
                    if (lu.size() != 2) throw InvalidArgument("malformed domain '" + value + "'");
                    snap.domain.lower.push_back(parse_number(lu[0]));
                    snap.domain.upper.push_back(parse_number(lu[1]));
                }
                have_domain = true;
            } else if (key == "t") {
                snap.time = parse_number(value);
                have_t = true;
            } else {
                throw InvalidArgument("unknown header key '" + key + "'");
            }
            continue;
        }
        snap.values.push_back(parse_number(line));
    }
    if (!(have_d && have_n && have_domain && have_t)) throw InvalidArgument("density file is missing header lines");
    if (snap.counts.size() != d || snap.domain.dim() != d) throw InvalidArgument("density header dimensions disagree");
    std::size_t cells = 1;
    for (std::size_t c : snap.counts) cells *= c;
    if (snap.values.size() != cells) throw InvalidArgument("density file has the wrong number of values");
    return snap;
}

void write_density_file(const std::string& path, const Density& density, double time) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
    write_density(out, density, time);
}

DensitySnapshot read_density_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    return read_density(in);
}

void write_observations(std::ostream& out, const ObservationSequence& obs) {
    out << "t,z\n";
    for (const auto& o : obs.items()) out << format_double(o.time) << ',' << format_double(o.value) << '\n';
}

ObservationSequence read_observations(std::istream& in) {
    std::vector<Observation> items;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (first && line == "t,z") {
            first = false;
            continue;
        }
        first = false;
        const auto parts = split(line, ',');
        if (parts.size() != 2) throw InvalidArgument("observation rows must be 't,z'");
        items.push_back({parse_number(parts[0]), parse_number(parts[1])});
    }
    return ObservationSequence(std::move(items));
}

void write_run_report(std::ostream& out, const std::vector<HistoryRecord>& history) {
    const std::size_t d = history.empty() ? 0 : history.front().mean.size();
    out << 't';
    for (std::size_t i = 0; i < d; ++i) out << ",mean_" << i + 1;
    for (std::size_t i = 0; i < d; ++i) out << ",std_" << i + 1;
    out << ",mode_count_axis1,log_evidence\n";
    for (const auto& r : history) {
        out << format_double(r.time);
        for (double m : r.mean) out << ',' << format_double(m);
        for (double s : r.stddev) out << ',' << format_double(s);
        out << ',' << r.mode_count << ',' << format_double(r.log_evidence) << '\n';
    }
}

}  // namespace fpfv
