#ifndef ZENOPURE_CONFIG_HPP
#define ZENOPURE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zenopure/linalg.hpp"
#include "zenopure/oscillator.hpp"

// Experiment configuration files.
//
//   # run settings
//   n_steps = 10
//   tau = tuned:1:plus          # or a plain number
//   initial_state = thermal     # thermal | maximally-mixed | mixed:K | fock:K
//   outputs = spectrum,purify
//   total_time = 5.2359877559829888
//   zeno_n = 1,2,4,8,16,32
//   seed = 0
//
//   [model]
//   kind = oscillator           # or explicit-matrix
//   big_omega = 1
//   omega = 1
//   g = 0.2
//   alpha = 0.5 0               # "re im"
//   beta = 1
//   cutoff_a = 30
//   cutoff_b = 30
//
// An explicit-matrix model instead names `matrix_file`, `matrix_kind`
// (hamiltonian | propagator) and `probe` ("re im" pairs). Matrix files start
// with a "dim_a dim_b" line followed by (dim_a*dim_b)^2 "re im" pairs, row-major.

namespace zenopure {

enum class ModelKind { oscillator, explicit_matrix };
enum class MatrixKind { hamiltonian, propagator };

struct TunedTau {
    int m = 1;
    oscillator::Branch branch = oscillator::Branch::plus;
    bool operator==(const TunedTau&) const = default;
};

using TauSpec = std::variant<double, TunedTau>;

struct ExperimentConfig {
    ModelKind model = ModelKind::oscillator;
    oscillator::OscillatorParams oscillator;  // tau is resolved from `tau` at run time
    std::string matrix_file;
    MatrixKind matrix_kind = MatrixKind::hamiltonian;
    std::vector<Complex> probe;

    int n_steps = 10;
    TauSpec tau = TunedTau{};
    std::vector<std::string> outputs;
    std::string initial_state = "thermal";
    std::optional<double> total_time;
    std::vector<int> zeno_n;
    std::uint64_t seed = 0;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError with a line number on any malformed or conflicting input.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string emit_config(const ExperimentConfig& cfg);

struct MatrixFile {
    Index dim_a = 0;
    Index dim_b = 0;
    ComplexMatrix matrix;
};

MatrixFile parse_matrix_file(const std::string& text);
MatrixFile load_matrix_file(const std::filesystem::path& path);
std::string emit_matrix_file(const MatrixFile& file);

/// Locale-independent, 17 significant digits.
std::string format_number(double x);

}  // namespace zenopure

#endif  // ZENOPURE_CONFIG_HPP
