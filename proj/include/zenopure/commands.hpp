#ifndef ZENOPURE_COMMANDS_HPP
#define ZENOPURE_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "zenopure/config.hpp"

namespace zenopure {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,
    kExitDegenerate = 2,
    kExitToleranceBreach = 3,
};

struct RunOptions {
    std::optional<int> cutoff;  // overrides both oscillator cutoffs
    std::optional<int> steps;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::optional<double> tol;  // falls back to ZENOPURE_TOL, then built-in defaults
};

/// Default tolerances of the compare command; a tolerance override replaces all four.
struct CompareTolerances {
    double factorization = 1e-5;
    double propagator = 1e-6;
    double trajectory = 1e-6;
    double geometric = 1e-4;
};

/// reference configuration: Omega = omega = 1, g = 0.2, alpha = 0.5, beta = 1, tau = 2 pi / Omega_+.
ExperimentConfig figure1_config();

/// Applies command-line overrides to a parsed configuration.
ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOptions& opts);

int cmd_spectrum(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out);
int cmd_purify(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out);
int cmd_compare(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out);
int cmd_zeno(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out);

/// Dispatches by name ("spectrum", "purify", "compare", "zeno", "figure1") and
/// maps library errors onto exit codes, writing diagnostics to `err`.
int run_command(const std::string& name, const ExperimentConfig& cfg, const RunOptions& opts,
                std::ostream& out, std::ostream& err);

}  // namespace zenopure

#endif  // ZENOPURE_COMMANDS_HPP
