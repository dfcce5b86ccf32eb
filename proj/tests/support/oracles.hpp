// Test-only reference computations. Nothing in here calls the code paths it is
// used to check: eigenvalues come from characteristic-polynomial roots,
// exponentials from a Taylor series, overlaps from explicit Fock sums.
#ifndef ZENOPURE_TESTS_ORACLES_HPP
#define ZENOPURE_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Monic characteristic polynomial det(xI - M) by Faddeev-LeVerrier.
/// Returns c with c[0] = 1 and p(x) = sum_k c[k] x^{n-k}.
inline std::vector<Complex> characteristic_polynomial(const Matrix& m) {
    const Eigen::Index n = m.rows();
    std::vector<Complex> c(n + 1);
    c[0] = 1.0;
    Matrix mk = Matrix::Zero(n, n);
    const Matrix id = Matrix::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        mk = m * mk + c[k - 1] * id;
        c[k] = -(m * mk).trace() / static_cast<double>(k);
    }
    return c;
}

inline Complex horner(const std::vector<Complex>& c, Complex x, Complex* derivative = nullptr) {
    Complex p = c[0];
    Complex dp = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
        dp = dp * x + p;
        p = p * x + c[k];
    }
    if (derivative) *derivative = dp;
    return p;
}

/// All roots of a monic polynomial by Aberth-Ehrlich iteration.
inline std::vector<Complex> polynomial_roots(const std::vector<Complex>& c) {
    const std::size_t n = c.size() - 1;
    double bound = 0.0;
    for (std::size_t k = 1; k <= n; ++k) bound = std::max(bound, std::abs(c[k]));
    bound = 1.0 + bound;  // Cauchy bound
    std::vector<Complex> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        z[k] = std::polar(0.5 * bound, 2.0 * M_PI * (k + 0.25) / static_cast<double>(n));
    }
    for (int iter = 0; iter < 2000; ++iter) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Complex dp;
            const Complex p = horner(c, z[i], &dp);
            if (p == Complex(0.0)) continue;
            const Complex newton = p / dp;
            Complex repulsion = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) repulsion += 1.0 / (z[i] - z[j]);
            }
            const Complex step = newton / (1.0 - newton * repulsion);
            z[i] -= step;
            change = std::max(change, std::abs(step) / std::max(1.0, std::abs(z[i])));
        }
        if (change < 1e-15) break;
    }
    return z;
}

inline std::vector<Complex> eigenvalues_by_charpoly(const Matrix& m) {
    auto roots = polynomial_roots(characteristic_polynomial(m));
    std::sort(roots.begin(), roots.end(),
              [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
    return roots;
}

/// exp(-i h t) from the truncated Taylor series with scaling and squaring.
inline Matrix taylor_unitary(const Matrix& h, double t, int terms = 30) {
    const Matrix x0 = Complex(0.0, -t) * h;
    int squarings = 0;
    double norm = x0.norm();
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    const Matrix x = x0 / std::pow(2.0, squarings);
    Matrix term = Matrix::Identity(h.rows(), h.cols());
    Matrix sum = term;
    for (int k = 1; k < terms; ++k) {
        term = term * x / static_cast<double>(k);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

/// <gamma| rho_thermal |gamma> by explicit Fock summation, both truncated at `cutoff`.
inline double thermal_coherent_overlap(double beta_omega, Complex gamma, int cutoff) {
    double z = 0.0;
    for (int n = 0; n <= cutoff; ++n) z += std::exp(-beta_omega * n);
    double sum = 0.0;
    double weight = std::exp(-std::norm(gamma));  // |<n|gamma>|^2 at n = 0
    for (int n = 0; n <= cutoff; ++n) {
        if (n > 0) weight *= std::norm(gamma) / n;
        sum += std::exp(-beta_omega * n) / z * weight;
    }
    return sum;
}

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double uniform(double lo = -1.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
};

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
    return m;
}

inline Vector random_unit_vector(Rng& rng, Eigen::Index dim) {
    Vector v = random_matrix(rng, dim, 1);
    return v.normalized();
}

inline Matrix random_hermitian(Rng& rng, Eigen::Index dim) {
    const Matrix g = random_matrix(rng, dim, dim);
    return 0.5 * (g + g.adjoint());
}

inline Matrix random_density(Rng& rng, Eigen::Index dim) {
    const Matrix g = random_matrix(rng, dim, dim);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

inline Matrix random_unitary(Rng& rng, Eigen::Index dim) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, dim, dim));
    return qr.householderQ() * Matrix::Identity(dim, dim);
}

}  // namespace oracle

#endif  // ZENOPURE_TESTS_ORACLES_HPP
