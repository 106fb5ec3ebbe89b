#include "fpfv/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "fpfv/errors.hpp"

namespace fpfv {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(trim(item));
    return parts;
}

std::vector<double> parse_list(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty() || t == "none") return {};
    std::vector<double> out;
    for (const auto& p : split(t, ',')) out.push_back(parse_scalar(p));
    return out;
}

std::size_t parse_count(const std::string& text) {
    const double v = parse_scalar(text);
    if (v < 0 || v != std::floor(v) || v > 1e12) throw ConfigError("expected a non-negative integer, got '" + text + "'");
    return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_counts(const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& p : split(trim(text), ',')) out.push_back(parse_count(p));
    return out;
}

bool parse_bool(const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("expected a boolean, got '" + text + "'");
}

BoxDomain parse_domain(const std::string& text) {
    BoxDomain box;
    for (const auto& axis : split(trim(text), ';')) {
        const auto lu = parse_list(axis);
        if (lu.size() != 2) throw ConfigError("domain axes are 'lower,upper' separated by ';'");
        box.lower.push_back(lu[0]);
        box.upper.push_back(lu[1]);
    }
    return box;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"field", [](RunConfig& c, const std::string& v) { c.field = trim(v); }},
        {"g_over_l", [](RunConfig& c, const std::string& v) { c.g_over_l = parse_scalar(v); }},
        {"domain", [](RunConfig& c, const std::string& v) { c.domain = parse_domain(v); }},
        {"n", [](RunConfig& c, const std::string& v) { c.n = parse_counts(v); }},
        {"bc",
         [](RunConfig& c, const std::string& v) {
             c.bc.clear();
             for (const auto& p : split(trim(v), ',')) c.bc.push_back(parse_boundary(p));
         }},
        {"xi", [](RunConfig& c, const std::string& v) { c.xi = parse_scalar(v); }},
        {"dt_rule",
         [](RunConfig& c, const std::string& v) {
             const std::string t = trim(v);
             if (t == "simplified") c.dt_rule = StepRule::Simplified;
             else if (t == "cfl") c.dt_rule = StepRule::Cfl;
             else throw ConfigError("dt_rule must be 'simplified' or 'cfl'");
         }},
        {"dt",
         [](RunConfig& c, const std::string& v) {
             const std::string t = trim(v);
             if (t == "auto") c.dt.reset();
             else c.dt = parse_scalar(t);
         }},
        {"quadrature", [](RunConfig& c, const std::string& v) { c.quadrature = parse_quadrature(trim(v)); }},
        {"prior", [](RunConfig& c, const std::string& v) { c.prior = trim(v); }},
        {"prior_mean", [](RunConfig& c, const std::string& v) { c.prior_mean = parse_list(v); }},
        {"prior_cov", [](RunConfig& c, const std::string& v) { c.prior_cov = parse_list(v); }},
        {"prior_file", [](RunConfig& c, const std::string& v) { c.prior_file = trim(v); }},
        {"normalize_prior", [](RunConfig& c, const std::string& v) { c.normalize_prior = parse_bool(v); }},
        {"observations", [](RunConfig& c, const std::string& v) { c.observations = trim(v); }},
        {"obs_file", [](RunConfig& c, const std::string& v) { c.obs_file = trim(v); }},
        {"truth_x0", [](RunConfig& c, const std::string& v) { c.truth_x0 = parse_list(v); }},
        {"obs_times", [](RunConfig& c, const std::string& v) { c.obs_times = parse_list(v); }},
        {"sigma", [](RunConfig& c, const std::string& v) { c.sigma = parse_scalar(v); }},
        {"seed",
         [](RunConfig& c, const std::string& v) {
             try {
                 std::size_t used = 0;
                 c.seed = std::stoull(trim(v), &used);
                 if (used != trim(v).size()) throw ConfigError("");
             } catch (const std::exception&) {
                 throw ConfigError("seed must be an unsigned integer");
             }
         }},
        {"t_end", [](RunConfig& c, const std::string& v) { c.t_end = parse_scalar(v); }},
        {"snapshot_times", [](RunConfig& c, const std::string& v) { c.snapshot_times = parse_list(v); }},
        {"markov_tol", [](RunConfig& c, const std::string& v) { c.markov_tol = parse_scalar(v); }},
        {"stationary", [](RunConfig& c, const std::string& v) { c.stationary = parse_bool(v); }},
        {"stationary_tol", [](RunConfig& c, const std::string& v) { c.stationary_tol = parse_scalar(v); }},
        {"stationary_max_iter", [](RunConfig& c, const std::string& v) { c.stationary_max_iter = parse_count(v); }},
        {"export_operator", [](RunConfig& c, const std::string& v) { c.export_operator = trim(v); }},
        {"n_list", [](RunConfig& c, const std::string& v) { c.n_list = parse_counts(v); }},
        {"t_final", [](RunConfig& c, const std::string& v) { c.t_final = parse_scalar(v); }},
        {"out", [](RunConfig& c, const std::string& v) { c.out = trim(v); }},
        {"threads", [](RunConfig& c, const std::string& v) { c.threads = std::max<std::size_t>(1, parse_count(v)); }},
    };
    return table;
}

}  // namespace

double parse_scalar(const std::string& text) {
    // factor ( ('*' | '/') factor )*, factor = [sign] (number [pi] | pi)
    const std::string s = trim(text);
    std::size_t pos = 0;
    auto fail = [&]() -> double { throw ConfigError("cannot parse number '" + text + "'"); };

    auto factor = [&]() -> double {
        double sign = 1.0;
        while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            if (s[pos] == '-') sign = -sign;
            ++pos;
        }
        double value = 1.0;
        bool any = false;
        if (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) {
            std::size_t used = 0;
            try {
                value = std::stod(s.substr(pos), &used);
            } catch (const std::exception&) {
                fail();
            }
            pos += used;
            any = true;
        }
        if (s.compare(pos, 2, "pi") == 0) {
            value *= kPi;
            pos += 2;
            any = true;
        }
        if (!any) fail();
        return sign * value;
    };

    if (s.empty()) fail();
    double value = factor();
    while (pos < s.size()) {
        const char op = s[pos++];
        if (op == '*') value *= factor();
        else if (op == '/') value /= factor();
        else fail();
    }
    if (!std::isfinite(value)) fail();
    return value;
}

RunConfig default_config(Command command) {
    RunConfig c;
    c.domain = BoxDomain{{-kPi, -kPi}, {kPi, kPi}};
    c.n = {50, 50};
    c.bc = {Boundary::Periodic, Boundary::Neumann};
    c.xi = kPi / (2.0 * kPi + 1.0);
    c.prior_mean = {0.0, 0.0};
    c.prior_cov = {0.64};
    c.truth_x0 = {0.2 * kPi, 0.0};
    for (int k = 1; k <= 6; ++k) c.obs_times.push_back(k * 2.0 * kPi / 7.0);
    c.seed = 20240607;
    c.t_end = 2.0 * kPi;
    c.snapshot_times = {0.0, kPi / 6.0, kPi / 3.0, kPi};
    c.n_list = {50, 100, 200, 400};
    c.t_final = kPi / 4.0;
    switch (command) {
        case Command::Converge:
            c.prior_mean = {0.6 * kPi, 0.0};
            c.normalize_prior = false;
            break;
        case Command::Filter:
            c.n = {200, 200};
            break;
        case Command::Operator:
            break;
    }
    return c;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, _] : setters()) k.push_back(name);
        return k;
    }();
    return keys;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
    const auto it = setters().find(trim(key));
    if (it == setters().end()) throw ConfigError("unknown configuration key '" + key + "'");
    try {
        it->second(config, value);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    }
}

void apply_config_text(RunConfig& config, const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    }
}

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(config, buf.str());
}

}  // namespace fpfv
