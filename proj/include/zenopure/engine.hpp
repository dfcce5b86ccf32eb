#ifndef ZENOPURE_ENGINE_HPP
#define ZENOPURE_ENGINE_HPP

#include <optional>
#include <vector>

#include "zenopure/linalg.hpp"

namespace zenopure {

/// Total Hamiltonian of A+B on the product basis, index = a_index * dim_b + b_index.
class BipartiteSystem {
public:
    BipartiteSystem(Index dim_a, Index dim_b, ComplexMatrix hamiltonian);

    Index dim_a() const noexcept { return dim_a_; }
    Index dim_b() const noexcept { return dim_b_; }
    const ComplexMatrix& hamiltonian() const noexcept { return hamiltonian_; }

private:
    Index dim_a_;
    Index dim_b_;
    ComplexMatrix hamiltonian_;
};

/// The state |phi> of A that every measurement confirms.
class ProbeState {
public:
    explicit ProbeState(ComplexVector amplitudes);

    const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
    Index dim() const noexcept { return amplitudes_.size(); }

private:
    ComplexVector amplitudes_;
};

/// V = <phi| exp(-i H tau) |phi>, an operator on B with all singular values <= 1.
class ProjectedPropagator {
public:
    ProjectedPropagator(ComplexMatrix matrix, double tau);

    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    double tau() const noexcept { return tau_; }
    Index dim() const noexcept { return matrix_.rows(); }

private:
    ComplexMatrix matrix_;
    double tau_;
};

class DensityMatrix {
public:
    /// Validates Hermiticity, unit trace and positivity.
    explicit DensityMatrix(ComplexMatrix matrix);

    static DensityMatrix pure(const ComplexVector& psi);
    static DensityMatrix maximally_mixed(Index dim);
    /// Maximally mixed over the first `levels` basis states of a `dim`-level space.
    static DensityMatrix mixed_over_levels(Index dim, Index levels);

    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    Index dim() const noexcept { return matrix_.rows(); }
    double purity() const;

private:
    ComplexMatrix matrix_;
};

struct StepResult {
    DensityMatrix state;
    double probability;
};

/// Conditional probabilities below this mark the confirmation as impossible.
inline constexpr double kExtinctionThreshold = 1e-14;

/// Default tolerance for |lambda0| = 1 in the conditions report.
inline constexpr double kConditionEpsilon = 1e-6;

ProjectedPropagator build_projected_propagator(const BipartiteSystem& sys, const ProbeState& phi,
                                               double tau);

/// Same as above with the spectral decomposition of H reused across many tau.
ProjectedPropagator build_projected_propagator(const BipartiteSystem& sys,
                                               const HermitianEigenDecomposition& eig,
                                               const ProbeState& phi, double tau);

/// <phi| U |phi> for an arbitrary operator U on A+B.
ComplexMatrix contract_probe(const ComplexMatrix& total, Index dim_a, Index dim_b,
                             const ComplexVector& phi);

/// One confirmed measurement: rho -> V rho V^dagger / p. Throws ExtinctBranch.
StepResult evolve_step(const DensityMatrix& rho, const ProjectedPropagator& v,
                       double threshold = kExtinctionThreshold);

/// Tr[V^n rho (V^dagger)^n].
double survival_probability(const DensityMatrix& rho, const ProjectedPropagator& v, int n);

double fidelity(const DensityMatrix& rho, const ComplexVector& pure);

/// (1/2) || rho - sigma ||_1
double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma);

struct TrajectoryStep {
    int n = 0;
    double conditional_probability = 1.0;
    double cumulative_yield = 1.0;
    std::optional<double> fidelity;
    double purity = 1.0;
    DensityMatrix state;
};

struct PurificationTrajectory {
    std::vector<TrajectoryStep> steps;  // n = 0 .. n_max, shorter if extinct
    ComplexVector target;               // empty when no target could be fixed
    bool extinct = false;
    int extinct_at = -1;
};

/// Iterates evolve_step n_max times. Without a target, fidelity is taken
/// against the dominant right eigenvector u0 of V (when one exists).
PurificationTrajectory run_purification(const DensityMatrix& rho0, const ProjectedPropagator& v,
                                        int n_max,
                                        const std::optional<ComplexVector>& target = std::nullopt,
                                        const PowerIterationOptions& opts = {});

struct ConditionsReport {
    Complex lambda0;
    std::optional<Complex> lambda1;
    double gap_ratio = 1.0;
    double yield_plateau_coefficient = 0.0;
    bool condition_i_met = false;
    double condition_ii_ratio = 1.0;
    bool degenerate = false;
    ComplexVector u0;
    ComplexVector v0;
};

ConditionsReport spectral_report(const ProjectedPropagator& v, const DensityMatrix& rho0,
                                 double epsilon = kConditionEpsilon,
                                 const PowerIterationOptions& opts = {});

struct ZenoPoint {
    int n;
    double tau;
    double yield;
    double unitarity_defect;
};

/// Fixed total time split into n confirmations, for each n in n_values.
/// `jobs` > 1 evaluates the points concurrently.
std::vector<ZenoPoint> zeno_limit_scan(const BipartiteSystem& sys, const ProbeState& phi,
                                       const DensityMatrix& rho0, double total_time,
                                       const std::vector<int>& n_values, int jobs = 1);

}  // namespace zenopure

#endif  // ZENOPURE_ENGINE_HPP
