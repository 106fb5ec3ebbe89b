#include <ostream>

#include "CLI11.hpp"
#include "fpfv/cli.hpp"
#include "fpfv/errors.hpp"

namespace fpfv {

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out;
    std::string seed;
    std::string threads;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
    sub->add_option("--config", opts.config_path, "flat key=value configuration file");
    sub->add_option("--out", opts.out, "output directory");
    sub->add_option("--seed", opts.seed, "random seed for synthesised observations");
    sub->add_option("--threads", opts.threads, "worker threads for numerical kernels");
    sub->allow_extras();
}

// Remaining "--key value" / "--key=value" pairs become configuration overrides.
void apply_overrides(RunConfig& config, const std::vector<std::string>& extras) {
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& arg = extras[i];
        if (arg.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + arg + "'");
        std::string key = arg.substr(2);
        std::string value;
        if (const auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.erase(eq);
        } else {
            if (i + 1 >= extras.size()) throw ConfigError("missing value for '" + arg + "'");
            value = extras[++i];
        }
        apply_setting(config, key, value);
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& log, std::ostream& err) {
    CLI::App app{"Upwind finite volume transition operators, convergence studies and grid-based filtering"};
    app.name("fpfv");
    app.require_subcommand(1);
    CommonOptions opts;
    CLI::App* op = app.add_subcommand("operator", "assemble and verify the transition matrix");
    CLI::App* conv = app.add_subcommand("converge", "mesh refinement study of the L1 differences");
    CLI::App* filt = app.add_subcommand("filter", "sequential Bayesian filtering run");
    for (CLI::App* sub : {op, conv, filt}) add_common(sub, opts);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        log << app.help();
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::config;
    }

    CLI::App* chosen = op->parsed() ? op : conv->parsed() ? conv : filt;
    const Command command = chosen == op ? Command::Operator : chosen == conv ? Command::Converge : Command::Filter;

    try {
        RunConfig config = default_config(command);
        if (!opts.config_path.empty()) apply_config_file(config, opts.config_path);
        if (!opts.out.empty()) apply_setting(config, "out", opts.out);
        if (!opts.seed.empty()) apply_setting(config, "seed", opts.seed);
        if (!opts.threads.empty()) apply_setting(config, "threads", opts.threads);
        apply_overrides(config, chosen->remaining());

        switch (command) {
            case Command::Operator: return cmd_operator(config, log);
            case Command::Converge: return cmd_converge(config, log);
            case Command::Filter: return cmd_filter(config, log);
        }
    } catch (const CflViolation& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::cfl;
    } catch (const ZeroEvidence& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::zero_evidence;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::config;
    }
    return exit_code::config;
}

}  // namespace fpfv
