#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "zenopure/commands.hpp"
#include "zenopure/config.hpp"

namespace {

struct Args {
    std::string config;
    std::string out;
    std::optional<int> cutoff;
    std::optional<int> steps;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help, Args& args,
                      bool needs_config) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* cfg = sub->add_option("--config", args.config, "Experiment configuration file");
    if (needs_config) cfg->required()->check(CLI::ExistingFile);
    sub->add_option("--cutoff", args.cutoff, "Fock cutoff for both oscillators (highest number state)");
    sub->add_option("--steps", args.steps, "Number of confirmed measurements");
    sub->add_option("--seed", args.seed, "Seed for eigensolver start vectors");
    sub->add_option("--out", args.out, "Write output here instead of stdout");
    sub->add_option("--jobs", args.jobs, "Parallel workers for sweeps")->check(CLI::PositiveNumber);
    return sub;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Purification by repeated confirmation of a probe system"};
    app.require_subcommand(1);
    Args args;
    add_command(app, "spectrum", "Dominant eigenvalues and purification conditions", args, true);
    add_command(app, "purify", "Fidelity/yield trajectory as CSV", args, true);
    add_command(app, "compare", "Engine against the closed-form oscillator solution", args, true);
    add_command(app, "zeno", "Fixed total time, increasing measurement count", args, true);
    add_command(app, "figure1", "purify with the built-in reference oscillator parameters", args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : zenopure::kExitConfigError;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    zenopure::RunOptions opts;
    opts.cutoff = args.cutoff;
    opts.steps = args.steps;
    opts.seed = args.seed;
    opts.jobs = args.jobs;

    zenopure::ExperimentConfig cfg;
    if (name != "figure1") {
        try {
            cfg = zenopure::load_config(args.config);
        } catch (const zenopure::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return zenopure::kExitConfigError;
        }
    }

    if (args.out.empty()) return zenopure::run_command(name, cfg, opts, std::cout, std::cerr);
    std::ofstream file(args.out);
    if (!file) {
        std::cerr << "error: cannot write " << args.out << "\n";
        return zenopure::kExitConfigError;
    }
    return zenopure::run_command(name, cfg, opts, file, std::cerr);
}
