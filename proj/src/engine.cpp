#include "zenopure/engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace zenopure {

namespace {

constexpr double kStateTolerance = 1e-10;
constexpr double kPositivityTolerance = 1e-9;
constexpr double kProbeNormTolerance = 1e-10;
constexpr double kContractionTolerance = 1e-9;

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

ComplexMatrix matrix_power(const ComplexMatrix& m, int n) {
    ComplexMatrix out = ComplexMatrix::Identity(m.rows(), m.cols());
    ComplexMatrix base = m;
    // square-and-multiply
    while (n > 0) {
        if (n & 1) out = out * base;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return out;
}

}  // namespace

BipartiteSystem::BipartiteSystem(Index dim_a, Index dim_b, ComplexMatrix hamiltonian)
    : dim_a_(dim_a), dim_b_(dim_b), hamiltonian_(std::move(hamiltonian)) {
    if (dim_a_ <= 0 || dim_b_ <= 0) throw InvalidArgument("BipartiteSystem: dimensions must be positive");
    const Index dim = dim_a_ * dim_b_;
    if (dim > kMaxDimension) throw DimensionLimitExceeded("BipartiteSystem: dim_a*dim_b too large");
    if (hamiltonian_.rows() != dim || hamiltonian_.cols() != dim) {
        throw DimensionMismatch("BipartiteSystem: Hamiltonian is " +
                                std::to_string(hamiltonian_.rows()) + "x" +
                                std::to_string(hamiltonian_.cols()) + ", expected " +
                                std::to_string(dim) + "x" + std::to_string(dim));
    }
    if (!is_finite(hamiltonian_)) throw InvalidArgument("BipartiteSystem: non-finite Hamiltonian");
    const double defect = hermiticity_defect(hamiltonian_);
    if (defect > kHermitianTolerance) {
        throw NotHermitian("BipartiteSystem: Hamiltonian asymmetry " + std::to_string(defect));
    }
}

ProbeState::ProbeState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) throw InvalidArgument("ProbeState: empty vector");
    if (!is_finite(amplitudes_)) throw InvalidArgument("ProbeState: non-finite amplitudes");
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > kProbeNormTolerance) {
        throw InvalidArgument("ProbeState: norm " + std::to_string(norm) + " differs from 1");
    }
}

ProjectedPropagator::ProjectedPropagator(ComplexMatrix matrix, double tau)
    : matrix_(std::move(matrix)), tau_(tau) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        throw DimensionMismatch("ProjectedPropagator: matrix must be square and non-empty");
    }
    if (!(tau_ >= 0.0)) throw InvalidArgument("ProjectedPropagator: tau must be >= 0");
    if (!is_finite(matrix_)) throw InvalidArgument("ProjectedPropagator: non-finite entries");
    const double smax = largest_singular_value(matrix_);
    if (smax > 1.0 + kContractionTolerance) {
        throw InvalidArgument("ProjectedPropagator: largest singular value " +
                              std::to_string(smax) + " exceeds 1");
    }
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        throw DimensionMismatch("DensityMatrix: matrix must be square and non-empty");
    }
    if (!is_finite(matrix_)) throw InvalidArgument("DensityMatrix: non-finite entries");
    if ((matrix_ - matrix_.adjoint()).norm() > kStateTolerance) {
        throw InvalidArgument("DensityMatrix: not Hermitian");
    }
    const Complex tr = matrix_.trace();
    if (std::abs(tr - 1.0) > kStateTolerance) {
        throw InvalidArgument("DensityMatrix: trace " + std::to_string(tr.real()) + " differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(matrix_),
                                                        Eigen::EigenvaluesOnly);
    const double smallest = solver.eigenvalues()(0);
    if (smallest < -kPositivityTolerance) {
        throw InvalidArgument("DensityMatrix: negative eigenvalue " + std::to_string(smallest));
    }
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
    const double n2 = psi.squaredNorm();
    if (n2 == 0.0) throw InvalidArgument("DensityMatrix::pure: zero vector");
    return DensityMatrix(psi * psi.adjoint() / n2);
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) { return mixed_over_levels(dim, dim); }

DensityMatrix DensityMatrix::mixed_over_levels(Index dim, Index levels) {
    if (levels <= 0 || levels > dim) {
        throw InvalidArgument("DensityMatrix::mixed_over_levels: levels outside [1, dim]");
    }
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (Index i = 0; i < levels; ++i) m(i, i) = 1.0 / static_cast<double>(levels);
    return DensityMatrix(std::move(m));
}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

ComplexMatrix contract_probe(const ComplexMatrix& total, Index dim_a, Index dim_b,
                             const ComplexVector& phi) {
    if (phi.size() != dim_a) {
        throw DimensionMismatch("contract_probe: probe has dimension " + std::to_string(phi.size()) +
                                ", system A has " + std::to_string(dim_a));
    }
    if (total.rows() != dim_a * dim_b || total.cols() != dim_a * dim_b) {
        throw DimensionMismatch("contract_probe: operator does not act on A+B");
    }
    ComplexMatrix v = ComplexMatrix::Zero(dim_b, dim_b);
    for (Index k = 0; k < dim_a; ++k) {
        const Complex bra = std::conj(phi[k]);
        if (bra == Complex(0.0)) continue;
        for (Index l = 0; l < dim_a; ++l) {
            const Complex w = bra * phi[l];
            if (w == Complex(0.0)) continue;
            v += w * total.block(k * dim_b, l * dim_b, dim_b, dim_b);
        }
    }
    return v;
}

ProjectedPropagator build_projected_propagator(const BipartiteSystem& sys,
                                               const HermitianEigenDecomposition& eig,
                                               const ProbeState& phi, double tau) {
    if (!(tau >= 0.0)) throw InvalidArgument("build_projected_propagator: tau must be >= 0");
    if (phi.dim() != sys.dim_a()) {
        throw DimensionMismatch("build_projected_propagator: probe dimension " +
                                std::to_string(phi.dim()) + " != dim_a " +
                                std::to_string(sys.dim_a()));
    }
    const ComplexMatrix u = unitary_exponential(eig, tau);
    return ProjectedPropagator(contract_probe(u, sys.dim_a(), sys.dim_b(), phi.amplitudes()), tau);
}

ProjectedPropagator build_projected_propagator(const BipartiteSystem& sys, const ProbeState& phi,
                                               double tau) {
    if (phi.dim() != sys.dim_a()) {
        throw DimensionMismatch("build_projected_propagator: probe dimension " +
                                std::to_string(phi.dim()) + " != dim_a " +
                                std::to_string(sys.dim_a()));
    }
    return build_projected_propagator(sys, hermitian_eigendecompose(sys.hamiltonian()), phi, tau);
}

StepResult evolve_step(const DensityMatrix& rho, const ProjectedPropagator& v, double threshold) {
    if (rho.dim() != v.dim()) {
        throw DimensionMismatch("evolve_step: state dimension " + std::to_string(rho.dim()) +
                                " != propagator dimension " + std::to_string(v.dim()));
    }
    const ComplexMatrix& m = v.matrix();
    const ComplexMatrix sigma = hermitian_part(m * rho.matrix() * m.adjoint());
    const double p = sigma.trace().real();
    if (!(p > threshold)) {
        throw ExtinctBranch("evolve_step: confirmation probability " + std::to_string(p) +
                                " below threshold",
                            p);
    }
    return {DensityMatrix(sigma / p), std::min(p, 1.0)};
}

double survival_probability(const DensityMatrix& rho, const ProjectedPropagator& v, int n) {
    if (n < 0) throw InvalidArgument("survival_probability: n must be >= 0");
    if (rho.dim() != v.dim()) throw DimensionMismatch("survival_probability: dimension mismatch");
    const ComplexMatrix w = matrix_power(v.matrix(), n);
    return (w * rho.matrix() * w.adjoint()).trace().real();
}

double fidelity(const DensityMatrix& rho, const ComplexVector& pure) {
    if (pure.size() != rho.dim()) {
        throw DimensionMismatch("fidelity: vector dimension " + std::to_string(pure.size()) +
                                " != state dimension " + std::to_string(rho.dim()));
    }
    return pure.dot(rho.matrix() * pure).real();
}

double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw DimensionMismatch("trace_distance: dimension mismatch");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(rho - sigma),
                                                        Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

PurificationTrajectory run_purification(const DensityMatrix& rho0, const ProjectedPropagator& v,
                                        int n_max, const std::optional<ComplexVector>& target,
                                        const PowerIterationOptions& opts) {
    if (n_max < 1) throw InvalidArgument("run_purification: n_max must be >= 1");
    if (rho0.dim() != v.dim()) throw DimensionMismatch("run_purification: dimension mismatch");

    PurificationTrajectory traj;
    if (target) {
        if (target->size() != v.dim()) throw DimensionMismatch("run_purification: target dimension");
        if (std::abs(target->norm() - 1.0) > kProbeNormTolerance) {
            throw InvalidArgument("run_purification: target must be unit-norm");
        }
        traj.target = *target;
    } else {
        try {
            traj.target = dominant_eigenpair(v.matrix(), opts).right;
        } catch (const NoConvergence&) {
            traj.target = ComplexVector();
        }
    }
    auto fid = [&traj](const DensityMatrix& s) -> std::optional<double> {
        if (traj.target.size() == 0) return std::nullopt;
        return fidelity(s, traj.target);
    };

    traj.steps.reserve(static_cast<std::size_t>(n_max) + 1);
    traj.steps.push_back({0, 1.0, 1.0, fid(rho0), rho0.purity(), rho0});
    for (int n = 1; n <= n_max; ++n) {
        const TrajectoryStep& prev = traj.steps.back();
        try {
            StepResult r = evolve_step(prev.state, v);
            const double yield = prev.cumulative_yield * r.probability;
            const double purity = r.state.purity();
            const auto f = fid(r.state);
            traj.steps.push_back({n, r.probability, yield, f, purity, std::move(r.state)});
        } catch (const ExtinctBranch&) {
            traj.extinct = true;
            traj.extinct_at = n;
            break;
        }
    }
    return traj;
}

ConditionsReport spectral_report(const ProjectedPropagator& v, const DensityMatrix& rho0,
                                 double epsilon, const PowerIterationOptions& opts) {
    if (rho0.dim() != v.dim()) throw DimensionMismatch("spectral_report: dimension mismatch");
    ConditionsReport rep;
    const int k = v.dim() >= 2 ? 2 : 1;
    const EigenPairSequence seq = top_k_eigenpairs(v.matrix(), k, opts);
    rep.degenerate = seq.degenerate;
    if (seq.pairs.empty()) {
        rep.lambda0 = Complex(std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN());
        rep.gap_ratio = 1.0;
        rep.condition_ii_ratio = 1.0;
        return rep;
    }
    const EigenPair& p0 = seq.pairs.front();
    rep.lambda0 = p0.value;
    rep.u0 = p0.right;
    rep.v0 = p0.left;
    rep.yield_plateau_coefficient =
        p0.right.squaredNorm() * p0.left.dot(rho0.matrix() * p0.left).real();
    const double mag0 = std::abs(p0.value);
    if (seq.pairs.size() >= 2) {
        rep.lambda1 = seq.pairs[1].value;
        rep.gap_ratio = mag0 > 0.0 ? std::min(1.0, std::abs(*rep.lambda1) / mag0) : 0.0;
    } else if (k == 1) {
        rep.gap_ratio = 0.0;
    }
    rep.condition_ii_ratio = rep.gap_ratio;
    if (rep.degenerate) {
        rep.condition_i_met = false;
        return rep;
    }
    rep.condition_i_met = std::abs(mag0 - 1.0) <= epsilon;
    return rep;
}

std::vector<ZenoPoint> zeno_limit_scan(const BipartiteSystem& sys, const ProbeState& phi,
                                       const DensityMatrix& rho0, double total_time,
                                       const std::vector<int>& n_values, int jobs) {
    if (!(total_time > 0.0)) throw InvalidArgument("zeno_limit_scan: total_time must be > 0");
    for (int n : n_values) {
        if (n < 1) throw InvalidArgument("zeno_limit_scan: every n must be >= 1");
    }
    if (rho0.dim() != sys.dim_b()) throw DimensionMismatch("zeno_limit_scan: state dimension");
    const HermitianEigenDecomposition eig = hermitian_eigendecompose(sys.hamiltonian());

    auto evaluate = [&](int n) {
        const double tau = total_time / n;
        const ProjectedPropagator v = build_projected_propagator(sys, eig, phi, tau);
        const ComplexMatrix w = matrix_power(v.matrix(), n);
        const double yield = (w * rho0.matrix() * w.adjoint()).trace().real();
        const double defect =
            (w.adjoint() * w - ComplexMatrix::Identity(w.rows(), w.cols())).norm();
        return ZenoPoint{n, tau, yield, defect};
    };

    std::vector<ZenoPoint> out(n_values.size());
    if (jobs <= 1 || n_values.size() <= 1) {
        for (std::size_t i = 0; i < n_values.size(); ++i) out[i] = evaluate(n_values[i]);
        return out;
    }
    const std::size_t batch = static_cast<std::size_t>(jobs);
    for (std::size_t start = 0; start < n_values.size(); start += batch) {
        std::vector<std::future<ZenoPoint>> pending;
        const std::size_t stop = std::min(n_values.size(), start + batch);
        for (std::size_t i = start; i < stop; ++i) {
            pending.push_back(std::async(std::launch::async, evaluate, n_values[i]));
        }
        for (std::size_t i = start; i < stop; ++i) out[i] = pending[i - start].get();
    }
    return out;
}

}  // namespace zenopure
