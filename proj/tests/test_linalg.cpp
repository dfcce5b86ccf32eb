#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "zenopure/engine.hpp"
#include "zenopure/linalg.hpp"
#include "zenopure/oscillator.hpp"

using namespace zenopure;

namespace {

ComplexMatrix diag(std::initializer_list<Complex> d) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    Index i = 0;
    for (Complex x : d) m(i, i) = x, ++i;
    return m;
}

ComplexMatrix number_operator(int levels) {
    ComplexMatrix m = ComplexMatrix::Zero(levels, levels);
    for (int n = 0; n < levels; ++n) m(n, n) = n;
    return m;
}

}  // namespace

TEST_CASE("tensor product of identities is identity") {
    const ComplexMatrix r = tensor_product(identity(2), identity(3));
    CHECK(r.rows() == 6);
    CHECK((r - identity(6)).norm() == 0.0);
}

TEST_CASE("tensor product index bookkeeping") {
    ComplexMatrix raise = ComplexMatrix::Zero(2, 2);
    raise(0, 1) = 1.0;
    const ComplexMatrix r = tensor_product(raise, identity(2));
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected(0, 2) = 1.0;
    expected(1, 3) = 1.0;
    CHECK((r - expected).norm() == 0.0);
}

TEST_CASE("sum of number operators has index-pair spectrum") {
    const ComplexMatrix h =
        tensor_product(number_operator(3), identity(2)) + tensor_product(identity(3), number_operator(2));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 2; ++b) CHECK(h(a * 2 + b, a * 2 + b).real() == doctest::Approx(a + b));
    CHECK((h - ComplexMatrix(h.diagonal().asDiagonal())).norm() == 0.0);
    const auto eig = hermitian_eigendecompose(h);
    const double expected[] = {0, 1, 1, 2, 2, 3};
    for (int k = 0; k < 6; ++k) CHECK(eig.eigenvalues(k) == doctest::Approx(expected[k]).epsilon(1e-14));
}

TEST_CASE("tensor product refuses oversize results") {
    CHECK_THROWS_AS(tensor_product(identity(100), identity(100)), DimensionLimitExceeded);
}

TEST_CASE("adjoint") {
    ComplexMatrix m(1, 1);
    m(0, 0) = Complex(0, 1);
    CHECK(adjoint(m)(0, 0) == Complex(0, -1));

    oracle::Rng rng(7);
    const ComplexMatrix h = oracle::random_hermitian(rng, 4);
    CHECK((adjoint(h) - h).norm() == 0.0);

    const ComplexMatrix g = oracle::random_matrix(rng, 3, 3);
    CHECK((adjoint(adjoint(g)) - g).norm() == 0.0);
    const ComplexVector x = oracle::random_matrix(rng, 3, 1);
    const ComplexVector y = oracle::random_matrix(rng, 3, 1);
    const Complex lhs = x.dot(g * y);
    const Complex rhs = (adjoint(g) * x).dot(y);
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("hermitian eigendecomposition examples") {
    SUBCASE("diagonal") {
        const auto eig = hermitian_eigendecompose(diag({3, 1, 2}));
        CHECK(eig.eigenvalues(0) == doctest::Approx(1.0));
        CHECK(eig.eigenvalues(1) == doctest::Approx(2.0));
        CHECK(eig.eigenvalues(2) == doctest::Approx(3.0));
        // permutation: each column has exactly one unit-modulus entry
        for (int c = 0; c < 3; ++c) CHECK(eig.eigenvectors.col(c).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    }
    SUBCASE("pauli x") {
        ComplexMatrix x = ComplexMatrix::Zero(2, 2);
        x(0, 1) = x(1, 0) = 1.0;
        const auto eig = hermitian_eigendecompose(x);
        CHECK(eig.eigenvalues(0) == doctest::Approx(-1.0));
        CHECK(eig.eigenvalues(1) == doctest::Approx(1.0));
    }
    SUBCASE("truncated oscillator vs characteristic polynomial") {
        oscillator::OscillatorParams p;
        p.cutoff_a = p.cutoff_b = 2;
        const ComplexMatrix h = oscillator::build_hamiltonian(p).hamiltonian();
        const auto eig = hermitian_eigendecompose(h);
        auto roots = oracle::polynomial_roots(oracle::characteristic_polynomial(h));
        std::vector<double> re;
        for (Complex z : roots) {
            CHECK(std::abs(z.imag()) < 1e-8);
            re.push_back(z.real());
        }
        std::sort(re.begin(), re.end());
        for (Index k = 0; k < 9; ++k) CHECK(std::abs(eig.eigenvalues(k) - re[k]) < 1e-8);
    }
    SUBCASE("rejects non-hermitian input") {
        ComplexMatrix m = ComplexMatrix::Zero(2, 2);
        m(0, 1) = 1.0;
        CHECK_THROWS_AS(hermitian_eigendecompose(m), NotHermitian);
    }
}

TEST_CASE("eigendecomposition invariants on random input") {
    oracle::Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Index d = rng.integer(1, 12);
        const ComplexMatrix h = oracle::random_hermitian(rng, d);
        const auto eig = hermitian_eigendecompose(h);
        const ComplexMatrix& q = eig.eigenvectors;
        const ComplexMatrix recon = q * eig.eigenvalues.cast<Complex>().asDiagonal() * q.adjoint();
        CHECK((recon - h).norm() <= 1e-10 * h.norm());
        CHECK((q.adjoint() * q - identity(d)).norm() <= 1e-10 * std::sqrt(static_cast<double>(d)));
        for (Index k = 1; k < d; ++k) CHECK(eig.eigenvalues(k - 1) <= eig.eigenvalues(k));
    }
}

TEST_CASE("unitary exponential") {
    oracle::Rng rng(3);
    const ComplexMatrix h = oracle::random_hermitian(rng, 4);
    CHECK((unitary_exponential(h, 0.0) - identity(4)).norm() < 1e-14);

    const ComplexMatrix u = unitary_exponential(diag({1, 2}), M_PI);
    CHECK(std::abs(u(0, 0) - Complex(-1, 0)) < 1e-14);
    CHECK(std::abs(u(1, 1) - Complex(1, 0)) < 1e-14);
    CHECK(std::abs(u(0, 1)) < 1e-14);

    const ComplexMatrix taylor = oracle::taylor_unitary(h, 0.3);
    CHECK((unitary_exponential(h, 0.3) - taylor).cwiseAbs().maxCoeff() < 1e-10);

    for (int trial = 0; trial < 10; ++trial) {
        const Index d = rng.integer(1, 8);
        const ComplexMatrix hh = oracle::random_hermitian(rng, d);
        const double s = rng.uniform(-3, 3);
        const double t = rng.uniform(-3, 3);
        const ComplexMatrix us = unitary_exponential(hh, s);
        const ComplexMatrix ut = unitary_exponential(hh, t);
        CHECK((us * ut - unitary_exponential(hh, s + t)).norm() < 1e-9);
        CHECK((us.adjoint() * us - identity(d)).norm() <= 1e-9 * std::sqrt(static_cast<double>(d)));
    }
}

TEST_CASE("dominant eigenpair examples") {
    const auto pair = dominant_eigenpair(diag({0.9, 0.5}));
    CHECK(std::abs(pair.value - 0.9) < 1e-10);
    CHECK(std::abs(std::abs(pair.right(0)) - 1.0) < 1e-10);
    CHECK(std::abs(pair.right(1)) < 1e-9);
    CHECK(std::abs(pair.right.norm() - 1.0) < 1e-12);
    CHECK(std::abs(pair.left.dot(pair.right) - 1.0) < 1e-10);

    ComplexMatrix jordan(2, 2);
    jordan << 0.5, 0.3, 0.0, 0.5;
    PowerIterationOptions opts;
    opts.max_iter = 20000;
    bool refused = false;
    try {
        const auto p = dominant_eigenpair(jordan, opts);
        refused = p.residual > opts.tol;
    } catch (const NoConvergence&) {
        refused = true;
    }
    CHECK(refused);
}

TEST_CASE("deflation examples") {
    const ComplexMatrix m = diag({0.9, 0.5});
    const auto pair = dominant_eigenpair(m);
    const ComplexMatrix d = deflate(m, pair);
    CHECK((d - diag({0.0, 0.5})).norm() < 1e-9);

    oracle::Rng rng(5);
    const ComplexVector u = oracle::random_unit_vector(rng, 4);
    const ComplexVector w = oracle::random_unit_vector(rng, 4);
    const ComplexMatrix rank1 = Complex(0.7, 0.2) * u * w.adjoint();
    const auto p1 = dominant_eigenpair(rank1);
    CHECK(deflate(rank1, p1).norm() < 1e-12);
}

TEST_CASE("top-k eigenpairs") {
    const auto seq = top_k_eigenpairs(diag({0.9, 0.5, 0.1}), 3);
    REQUIRE(seq.pairs.size() == 3);
    CHECK(!seq.truncated);
    CHECK(!seq.degenerate);
    CHECK(std::abs(seq.pairs[0].value - 0.9) < 1e-10);
    CHECK(std::abs(seq.pairs[1].value - 0.5) < 1e-10);
    CHECK(std::abs(seq.pairs[2].value - 0.1) < 1e-10);

    oracle::Rng rng(9);
    const auto uni = top_k_eigenpairs(oracle::random_unitary(rng, 3), 2);
    CHECK(uni.degenerate);
}

TEST_CASE("biorthonormality and charpoly oracle on random contractions") {
    oracle::Rng rng(21);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const Index d = rng.integer(2, 6);
        // distinct magnitudes by construction: similarity transform of a diagonal
        ComplexMatrix dd = ComplexMatrix::Zero(d, d);
        for (Index i = 0; i < d; ++i) dd(i, i) = std::polar(1.0 - 0.15 * static_cast<double>(i), rng.uniform(-M_PI, M_PI));
        const ComplexMatrix s = identity(d) + 0.3 * oracle::random_matrix(rng, d, d);
        const ComplexMatrix m = s * dd * s.inverse();
        const auto seq = top_k_eigenpairs(m, static_cast<int>(std::min<Index>(d, 3)));
        REQUIRE(!seq.truncated);
        const auto roots = oracle::eigenvalues_by_charpoly(m);
        CHECK(std::abs(seq.pairs[0].value - roots[0]) < 1e-7);
        for (std::size_t a = 0; a < seq.pairs.size(); ++a)
            for (std::size_t b = 0; b < seq.pairs.size(); ++b) {
                const Complex overlap = seq.pairs[a].left.dot(seq.pairs[b].right);
                CHECK(std::abs(overlap - (a == b ? 1.0 : 0.0)) <= 1e-8);
            }
        ++checked;
    }
    CHECK(checked == 40);
}

TEST_CASE("largest singular value and hermiticity defect") {
    CHECK(largest_singular_value(diag({0.3, -2.0})) == doctest::Approx(2.0));
    CHECK(hermiticity_defect(ComplexMatrix::Zero(3, 3)) == 0.0);
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK(hermiticity_defect(m) == doctest::Approx(std::sqrt(2.0)));
    ComplexMatrix bad = identity(2);
    bad(0, 0) = std::nan("");
    CHECK(!is_finite(bad));
    CHECK(is_finite(identity(2)));
}
