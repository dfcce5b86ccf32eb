#include "zenopure/linalg.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace zenopure {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionMismatch(std::string(what) + ": matrix must be square and non-empty, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

// Deterministic start vector; std::normal_distribution is not portable across
// standard libraries, so draw uniforms straight from the engine bits.
ComplexVector start_vector(Index dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
    ComplexVector x(dim);
    for (Index i = 0; i < dim; ++i) {
        const double re = uniform();
        const double im = uniform();
        x[i] = Complex(re, im);
    }
    const double n = x.norm();
    if (n == 0.0) {
        x.setOnes();
        return x.normalized();
    }
    return x / n;
}

struct PowerResult {
    Complex value;
    ComplexVector vector;
    double residual;
    bool converged;
};

PowerResult power_iterate(const ComplexMatrix& m, const PowerIterationOptions& opts,
                          std::uint64_t seed) {
    ComplexVector x = start_vector(m.rows(), seed);
    ComplexVector y(m.rows());
    PowerResult out{Complex(0.0), x, std::numeric_limits<double>::infinity(), false};
    for (long it = 0; it < opts.max_iter; ++it) {
        y.noalias() = m * x;
        const Complex lambda = x.dot(y);
        const double residual = (y - lambda * x).norm();
        out.value = lambda;
        out.vector = x;
        out.residual = residual;
        if (residual <= opts.tol) {
            out.converged = true;
            return out;
        }
        const double ny = y.norm();
        if (ny == 0.0) {
            // x lies in the kernel: exact eigenpair with eigenvalue zero.
            out.value = 0.0;
            out.residual = 0.0;
            out.converged = true;
            return out;
        }
        x = y / ny;
    }
    return out;
}

}  // namespace

bool is_finite(const ComplexMatrix& m) {
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            const Complex z = m(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
    }
    return true;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Index rows = a.rows() * b.rows();
    const Index cols = a.cols() * b.cols();
    if (rows > kMaxDimension || cols > kMaxDimension) {
        throw DimensionLimitExceeded("tensor_product: result " + std::to_string(rows) + "x" +
                                     std::to_string(cols) + " exceeds limit " +
                                     std::to_string(kMaxDimension));
    }
    ComplexMatrix out(rows, cols);
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix adjoint(const ComplexMatrix& m) { return m.adjoint(); }

ComplexMatrix identity(Index dim) { return ComplexMatrix::Identity(dim, dim); }

double hermiticity_defect(const ComplexMatrix& m) {
    require_square(m, "hermiticity_defect");
    const double norm = m.norm();
    if (norm == 0.0) return 0.0;
    return (m - m.adjoint()).norm() / norm;
}

double largest_singular_value(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

HermitianEigenDecomposition hermitian_eigendecompose(const ComplexMatrix& m, double tol) {
    require_square(m, "hermitian_eigendecompose");
    if (!is_finite(m)) throw InvalidArgument("hermitian_eigendecompose: non-finite entries");
    const double defect = hermiticity_defect(m);
    if (defect > tol) {
        throw NotHermitian("hermitian_eigendecompose: relative asymmetry " +
                           std::to_string(defect) + " exceeds " + std::to_string(tol));
    }
    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NoConvergence("hermitian_eigendecompose: QR iteration did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix unitary_exponential(const HermitianEigenDecomposition& eig, double t) {
    const Index n = eig.eigenvalues.size();
    ComplexVector phases(n);
    for (Index k = 0; k < n; ++k) phases[k] = std::polar(1.0, -eig.eigenvalues[k] * t);
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

ComplexMatrix unitary_exponential(const ComplexMatrix& h, double t) {
    return unitary_exponential(hermitian_eigendecompose(h), t);
}

EigenPair dominant_eigenpair(const ComplexMatrix& m, const PowerIterationOptions& opts) {
    require_square(m, "dominant_eigenpair");
    const PowerResult right = power_iterate(m, opts, opts.seed);
    if (!right.converged) {
        throw NoConvergence("dominant_eigenpair: residual " + std::to_string(right.residual) +
                            " after " + std::to_string(opts.max_iter) +
                            " iterations (no magnitude gap?)");
    }
    const ComplexMatrix mh = m.adjoint();
    const PowerResult left = power_iterate(mh, opts, opts.seed ^ 0x9e3779b97f4a7c15ULL);
    if (!left.converged) {
        throw NoConvergence("dominant_eigenpair: left eigenvector residual " +
                            std::to_string(left.residual));
    }
    const Complex overlap = left.vector.dot(right.vector);
    if (std::abs(overlap) < 1e-12) {
        throw NoConvergence("dominant_eigenpair: left and right eigenvectors are orthogonal");
    }
    EigenPair pair;
    pair.value = right.value;
    pair.right = right.vector;
    pair.left = left.vector / std::conj(overlap);
    pair.residual = right.residual;
    return pair;
}

ComplexMatrix deflate(const ComplexMatrix& m, const EigenPair& pair) {
    require_square(m, "deflate");
    if (pair.right.size() != m.rows() || pair.left.size() != m.rows()) {
        throw DimensionMismatch("deflate: eigenpair dimension does not match matrix");
    }
    return m - pair.value * pair.right * pair.left.adjoint();
}

EigenPairSequence top_k_eigenpairs(const ComplexMatrix& m, int k,
                                   const PowerIterationOptions& opts) {
    require_square(m, "top_k_eigenpairs");
    if (k < 0 || k > m.rows()) {
        throw InvalidArgument("top_k_eigenpairs: k=" + std::to_string(k) + " outside [0, " +
                              std::to_string(m.rows()) + "]");
    }
    EigenPairSequence out;
    ComplexMatrix work = m;
    for (int i = 0; i < k; ++i) {
        PowerIterationOptions stage = opts;
        stage.seed = opts.seed + static_cast<std::uint64_t>(i);
        try {
            out.pairs.push_back(dominant_eigenpair(work, stage));
        } catch (const NoConvergence&) {
            out.truncated = true;
            out.degenerate = true;
            break;
        }
        if (i > 0) {
            const double prev = std::abs(out.pairs[i - 1].value);
            const double cur = std::abs(out.pairs[i].value);
            if (prev > 0.0 && cur >= prev * (1.0 - kMagnitudeGapTolerance)) out.degenerate = true;
        }
        if (i + 1 < k) work = deflate(work, out.pairs.back());
    }
    return out;
}

}  // namespace zenopure
