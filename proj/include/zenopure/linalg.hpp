#ifndef ZENOPURE_LINALG_HPP
#define ZENOPURE_LINALG_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "zenopure/errors.hpp"

namespace zenopure {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Largest row or column count any constructed operator may have.
inline constexpr Index kMaxDimension = 4096;

/// Relative Frobenius tolerance for accepting a matrix as Hermitian.
inline constexpr double kHermitianTolerance = 1e-9;

bool is_finite(const ComplexMatrix& m);

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& m);
ComplexMatrix identity(Index dim);

/// ||m - m^dagger||_F / ||m||_F (zero for the zero matrix).
double hermiticity_defect(const ComplexMatrix& m);

double largest_singular_value(const ComplexMatrix& m);

struct HermitianEigenDecomposition {
    RealVector eigenvalues;     // ascending
    ComplexMatrix eigenvectors; // unitary, columns are eigenvectors
};

HermitianEigenDecomposition hermitian_eigendecompose(const ComplexMatrix& m,
                                                     double tol = kHermitianTolerance);

/// exp(-i h t) through the spectral decomposition of h.
ComplexMatrix unitary_exponential(const ComplexMatrix& h, double t);
ComplexMatrix unitary_exponential(const HermitianEigenDecomposition& eig, double t);

/// Right/left eigenvector pair in the gauge ||right||_2 = 1, (left|right) = 1.
/// `left` stores the ket w with (v| = w^dagger, so (v|x) = left.dot(x).
struct EigenPair {
    Complex value;
    ComplexVector right;
    ComplexVector left;
    double residual = 0.0;  // ||M right - value right||_2
};

struct PowerIterationOptions {
    double tol = 1e-10;
    long max_iter = 100000;
    std::uint64_t seed = 0;
};

/// Dominant eigenpair by power iteration on m (right) and m^dagger (left).
/// Throws NoConvergence when the residual never drops below tol, which is
/// what happens when |lambda0| = |lambda1|.
EigenPair dominant_eigenpair(const ComplexMatrix& m, const PowerIterationOptions& opts = {});

/// m - lambda |u)(v|
ComplexMatrix deflate(const ComplexMatrix& m, const EigenPair& pair);

struct EigenPairSequence {
    std::vector<EigenPair> pairs;  // descending |lambda|
    bool truncated = false;        // a stage failed to converge
    bool degenerate = false;       // no magnitude gap between consecutive pairs
};

/// Relative magnitude separation below which two eigenvalues count as tied.
inline constexpr double kMagnitudeGapTolerance = 1e-8;

EigenPairSequence top_k_eigenpairs(const ComplexMatrix& m, int k,
                                   const PowerIterationOptions& opts = {});

}  // namespace zenopure

#endif  // ZENOPURE_LINALG_HPP
