#include "zenopure/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace zenopure::oscillator {

namespace {

constexpr double kIntervalTolerance = 1e-9;
constexpr double kSingularTolerance = 1e-12;
constexpr double kCoherentTailLimit = 1e-10;
constexpr double kEigenvectorTailLimit = 1e-8;
constexpr double kClosedFormTailLimit = 1e-6;
// Extra number states used internally so truncation error stays outside the
// block handed back to callers.
constexpr int kPad = 24;

const Complex kI(0.0, 1.0);

std::string mass_text(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

double sinc_times(double delta, double tau) {
    // sin(delta tau) / delta, continuous at delta = 0
    return delta > 0.0 ? std::sin(delta * tau) / delta : tau;
}

ComplexMatrix number_operator_matrix(int cutoff) {
    ComplexMatrix n = ComplexMatrix::Zero(cutoff + 1, cutoff + 1);
    for (int k = 0; k <= cutoff; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

// exp(shift_down * b + shift_up * b^dag) on `dim` levels.
ComplexMatrix displacement_like(Complex shift_down, Complex shift_up, int cutoff) {
    const ComplexMatrix b = annihilation(cutoff);
    const ComplexMatrix gen = shift_down * b + shift_up * b.adjoint();
    return gen.exp();
}

}  // namespace

int OscillatorParams::cutoff_floor() const {
    return static_cast<int>(std::ceil(4.0 * (1.0 + std::norm(alpha))));
}

void OscillatorParams::validate() const {
    for (double x : {big_omega, omega, g, alpha.real(), alpha.imag(), beta, tau}) {
        if (!std::isfinite(x)) throw InvalidArgument("OscillatorParams: non-finite parameter");
    }
    if (!(beta > 0.0)) throw InvalidArgument("OscillatorParams: beta must be > 0");
    if (!(tau >= 0.0)) throw InvalidArgument("OscillatorParams: tau must be >= 0");
    const int floor = cutoff_floor();
    if (cutoff_a < floor || cutoff_b < floor) {
        throw CutoffTooSmall("OscillatorParams: cutoffs (" + std::to_string(cutoff_a) + ", " +
                             std::to_string(cutoff_b) + ") below floor " + std::to_string(floor));
    }
}

OscillatorParams figure1_params(int cutoff) {
    OscillatorParams p;
    p.big_omega = 1.0;
    p.omega = 1.0;
    p.g = 0.2;
    p.alpha = Complex(0.5, 0.0);
    p.beta = 1.0;
    p.cutoff_a = cutoff;
    p.cutoff_b = cutoff;
    p.tau = tuned_tau(p, 1, Branch::plus);
    return p;
}

ClosedFormCoefficients coefficients(const OscillatorParams& p, IntervalCheck check) {
    ClosedFormCoefficients c;
    const double detuning = p.big_omega - p.omega;
    const double mean = 0.5 * (p.big_omega + p.omega);
    c.delta = std::sqrt(p.g * p.g + detuning * detuning / 4.0);
    c.big_omega_plus = mean + c.delta;
    c.big_omega_minus = mean - c.delta;

    const double dt = c.delta * p.tau;
    if (check == IntervalCheck::strict) {
        const double r = std::fmod(dt, std::numbers::pi);
        if (std::min(r, std::numbers::pi - r) <= kIntervalTolerance) {
            throw DegenerateInterval("coefficients: delta*tau = " + std::to_string(dt) +
                                     " is a multiple of pi; no purification");
        }
    }

    const double s = sinc_times(c.delta, p.tau);  // sin(delta tau) / delta
    const Complex w(std::cos(dt), 0.5 * detuning * s);
    const Complex phase = std::polar(1.0, -mean * p.tau);
    const double a2 = std::norm(p.alpha);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    c.exp_c = phase * w;
    c.abs_exp_c = std::sqrt(std::max(0.0, 1.0 - (p.g * s) * (p.g * s)));

    // A / (1 - e^{-C}) = g s / (w - conj(p)) stays finite when w -> 0.
    const Complex gap = w - std::conj(phase);
    if (std::abs(gap) < kSingularTolerance) {
        if (check == IntervalCheck::strict) {
            throw DegenerateInterval("coefficients: 1 - e^{-C} vanishes");
        }
        c.a_ratio = c.alpha_tilde = c.lowering_shift = c.lambda0 = Complex(nan, nan);
    } else {
        c.a_ratio = p.g * s / gap;
        c.alpha_tilde = c.a_ratio * p.alpha;
        c.lowering_shift = c.a_ratio * std::conj(p.alpha);
    }

    if (std::abs(w) < kSingularTolerance) {
        // Complete exchange: A, e^B and e^{-C} diverge, e^C = 0 and V has rank one.
        // Using |w|^2 = 1 - g^2 s^2, the bracket of the exponential form reduces to
        // (w + w^* - p - p^*) / (w - p^*).
        c.exchange_complete = true;
        c.a_coef = c.exp_b = c.exp_neg_c = Complex(nan, nan);
        if (std::abs(gap) >= kSingularTolerance) {
            c.lambda0 = std::exp(-a2 * (w + std::conj(w) - phase - std::conj(phase)) / gap);
        }
    } else {
        c.a_coef = p.g * s / w;
        c.exp_b = phase / w;
        c.exp_neg_c = std::conj(phase) / w;
        if (std::abs(gap) >= kSingularTolerance) {
            c.lambda0 = std::exp(-a2 * (1.0 - c.exp_b - c.a_coef * c.a_ratio));
        }
    }

    // Cotangent form, multiplied through by sin(Omega_+ tau/2) sin(Omega_- tau/2)
    // so a single divergent cotangent just sends the bracket inverse to zero.
    const double x = c.delta > 0.0 ? detuning / (2.0 * c.delta) : 0.0;
    const double sp = std::sin(0.5 * c.big_omega_plus * p.tau);
    const double cp = std::cos(0.5 * c.big_omega_plus * p.tau);
    const double sm = std::sin(0.5 * c.big_omega_minus * p.tau);
    const double cm = std::cos(0.5 * c.big_omega_minus * p.tau);
    const Complex bracket = sp * sm - 0.5 * kI * ((1.0 + x) * cp * sm + (1.0 - x) * cm * sp);
    if (std::abs(bracket) < kSingularTolerance) {
        c.lambda0_cotangent = Complex(nan, nan);
    } else {
        c.lambda0_cotangent = std::exp(-2.0 * a2 * (sp * sm) / bracket);
    }
    return c;
}

Complex lambda_n(const ClosedFormCoefficients& c, int n) {
    if (n < 0) throw InvalidArgument("lambda_n: n must be >= 0");
    Complex out = c.lambda0;
    for (int k = 0; k < n; ++k) out *= c.exp_c;
    return out;
}

ComplexMatrix annihilation(int cutoff) {
    if (cutoff < 0) throw InvalidArgument("annihilation: cutoff must be >= 0");
    ComplexMatrix b = ComplexMatrix::Zero(cutoff + 1, cutoff + 1);
    for (int k = 1; k <= cutoff; ++k) b(k - 1, k) = std::sqrt(static_cast<double>(k));
    return b;
}

ComplexVector eigenvector_u_n(const ClosedFormCoefficients& c, int n, int cutoff) {
    if (n < 0 || n >= cutoff) {
        throw InvalidArgument("eigenvector_u_n: need 0 <= n < cutoff");
    }
    const int padded = cutoff + kPad;
    const ComplexMatrix u = displacement_like(c.lowering_shift, c.alpha_tilde, padded);
    const ComplexVector col = u.col(n);
    const double total = col.squaredNorm();
    const double tail = col.tail(padded - cutoff).squaredNorm() / total;
    if (tail > kEigenvectorTailLimit) {
        throw CutoffTooSmall("eigenvector_u_n: tail mass " + mass_text(tail) +
                             " beyond cutoff " + std::to_string(cutoff));
    }
    return col.head(cutoff + 1).normalized();
}

ComplexMatrix closed_form_projected_propagator(const ClosedFormCoefficients& c, int cutoff) {
    if (cutoff < 0) throw InvalidArgument("closed_form_projected_propagator: cutoff must be >= 0");
    const int padded = cutoff + kPad;
    const ComplexMatrix u = displacement_like(c.lowering_shift, c.alpha_tilde, padded);
    const ComplexMatrix u_inv = displacement_like(-c.lowering_shift, -c.alpha_tilde, padded);
    ComplexVector diag(padded + 1);
    Complex z = 1.0;
    for (int k = 0; k <= padded; ++k) {
        diag[k] = z;
        z *= c.exp_c;
    }
    const ComplexMatrix v = c.lambda0 * (u * diag.asDiagonal() * u_inv);
    return v.topLeftCorner(cutoff + 1, cutoff + 1);
}

BipartiteSystem build_hamiltonian(const OscillatorParams& p) {
    if (p.cutoff_a < 0 || p.cutoff_b < 0) throw InvalidArgument("build_hamiltonian: negative cutoff");
    const ComplexMatrix a = annihilation(p.cutoff_a);
    const ComplexMatrix b = annihilation(p.cutoff_b);
    const ComplexMatrix ia = identity(p.cutoff_a + 1);
    const ComplexMatrix ib = identity(p.cutoff_b + 1);
    const ComplexMatrix exchange = tensor_product(a.adjoint(), b);  // a^dag b
    ComplexMatrix h = p.big_omega * tensor_product(number_operator_matrix(p.cutoff_a), ib) +
                      p.omega * tensor_product(ia, number_operator_matrix(p.cutoff_b)) +
                      Complex(0.0, p.g) * (exchange - exchange.adjoint());
    h = 0.5 * (h + h.adjoint()).eval();
    return BipartiteSystem(p.cutoff_a + 1, p.cutoff_b + 1, std::move(h));
}

double coherent_tail_mass(Complex alpha, int cutoff) {
    const double a2 = std::norm(alpha);
    if (a2 == 0.0) return 0.0;
    const double log_a2 = std::log(a2);
    double tail = 0.0;
    for (int n = cutoff + 1;; ++n) {
        const double term = std::exp(-a2 + n * log_a2 - std::lgamma(n + 1.0));
        tail += term;
        if (n > a2 + 1.0 && (term < 1e-300 || term < 1e-17 * tail)) break;
    }
    return tail;
}

ComplexVector coherent_state(Complex alpha, int cutoff) {
    if (cutoff < 0) throw InvalidArgument("coherent_state: cutoff must be >= 0");
    const double tail = coherent_tail_mass(alpha, cutoff);
    if (tail > kCoherentTailLimit) {
        throw CutoffTooSmall("coherent_state: tail mass " + mass_text(tail) +
                             " beyond cutoff " + std::to_string(cutoff));
    }
    ComplexVector psi(cutoff + 1);
    Complex amp = std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n <= cutoff; ++n) {
        if (n > 0) amp *= alpha / std::sqrt(static_cast<double>(n));
        psi[n] = amp;
    }
    return psi;
}

DensityMatrix thermal_state(double beta, double omega, int cutoff) {
    if (!(beta * omega > 0.0)) throw InvalidArgument("thermal_state: beta*omega must be > 0");
    if (cutoff < 0) throw InvalidArgument("thermal_state: cutoff must be >= 0");
    RealVector w(cutoff + 1);
    for (int n = 0; n <= cutoff; ++n) w[n] = std::exp(-beta * omega * n);
    w /= w.sum();
    ComplexMatrix rho = ComplexMatrix::Zero(cutoff + 1, cutoff + 1);
    for (int n = 0; n <= cutoff; ++n) rho(n, n) = w[n];
    return DensityMatrix(std::move(rho));
}

ProbeState probe_state(const OscillatorParams& p) {
    return ProbeState(coherent_state(p.alpha, p.cutoff_a));
}

ThermalTrajectoryClosedForm closed_form_rho(const OscillatorParams& p, int n) {
    if (n < 0) throw InvalidArgument("closed_form_rho: n must be >= 0");
    p.validate();
    const ClosedFormCoefficients c = coefficients(p);
    const double boltzmann = std::exp(-p.beta * p.omega);
    const double decay = std::pow(c.abs_exp_c, 2.0 * n);  // |e^C|^{2N} = e^{2N Re C}
    const Complex enc = std::pow(c.exp_c, n);
    const Complex t = (1.0 - enc) * c.a_ratio;

    ThermalTrajectoryClosedForm out{n, Complex(), Complex(), 1.0 - decay * boltzmann,
                                    thermal_state(p.beta, p.omega, p.cutoff_b)};
    out.theta = t - std::conj(t) * enc * boltzmann;
    // D(N) = exp(gamma b^dag - gamma^* b) with gamma = +alpha Theta / (1 - q). With
    // this sign the state tends to |alpha~) and matches the iterated map exactly.
    out.displacement_argument = p.alpha * out.theta / out.gauge_norm;
    if (n == 0) return out;

    const int padded = p.cutoff_b + kPad;
    RealVector gauss(padded + 1);
    for (int k = 0; k <= padded; ++k) gauss[k] = std::pow(boltzmann * decay, k);
    const Complex gamma = out.displacement_argument;
    ComplexMatrix rho;
    if (gamma == Complex(0.0)) {
        rho = gauss.cast<Complex>().asDiagonal();
    } else {
        const ComplexMatrix b = annihilation(padded);
        // exp(G) = exp(-i h) with h = i G Hermitian
        const ComplexMatrix generator = gamma * b.adjoint() - std::conj(gamma) * b;
        const ComplexMatrix d = unitary_exponential(Complex(0.0, 1.0) * generator, 1.0);
        rho = d * gauss.cast<Complex>().asDiagonal() * d.adjoint();
    }
    rho /= rho.trace();
    const ComplexMatrix block = rho.topLeftCorner(p.cutoff_b + 1, p.cutoff_b + 1);
    const double kept = block.trace().real();
    if (1.0 - kept > kClosedFormTailLimit) {
        throw CutoffTooSmall("closed_form_rho: displaced thermal tail mass " +
                             mass_text(1.0 - kept) + " beyond cutoff " +
                             std::to_string(p.cutoff_b));
    }
    ComplexMatrix state = block / kept;
    state = 0.5 * (state + state.adjoint()).eval();
    out.state = DensityMatrix(std::move(state));
    return out;
}

ComplexMatrix factorized_propagator(const OscillatorParams& p) {
    if (p.cutoff_a < 0 || p.cutoff_b < 0) throw InvalidArgument("factorized_propagator: negative cutoff");
    const ClosedFormCoefficients c = coefficients(p, IntervalCheck::lenient);
    if (c.exchange_complete) {
        throw DegenerateInterval("factorized_propagator: complete exchange, the product form is singular");
    }
    const int na_max = p.cutoff_a;
    const int nb_max = p.cutoff_b;
    const Index db = nb_max + 1;
    const Index dim = (na_max + 1) * db;
    auto index = [db](int na, int nb) { return static_cast<Index>(na) * db + nb; };

    // Every factor conserves n_a + n_b, and the two exchange exponentials are
    // nilpotent, so their entries are finite sums computed term by term:
    //   e^{x a^dag b}|na,nb> = sum_k x^k/k! sqrt((na+k)!/na! nb!/(nb-k)!) |na+k, nb-k>
    //   e^{y a b^dag}|na,nb> = sum_k y^k/k! sqrt(na!/(na-k)! (nb+k)!/nb!) |na-k, nb+k>
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    const Complex x = c.a_coef;
    const Complex y = -c.a_coef;
    std::vector<Complex> pow_b(na_max + 1), pow_c(nb_max + 1);
    pow_b[0] = pow_c[0] = 1.0;
    for (int k = 1; k <= na_max; ++k) pow_b[k] = pow_b[k - 1] * c.exp_b;
    for (int k = 1; k <= nb_max; ++k) pow_c[k] = pow_c[k - 1] * c.exp_c;

    for (int na = 0; na <= na_max; ++na) {
        for (int nb = 0; nb <= nb_max; ++nb) {
            const Index col = index(na, nb);
            Complex right = 1.0;
            for (int k = 0; k <= std::min(na, nb_max - nb); ++k) {
                if (k > 0) {
                    right *= y / static_cast<double>(k) *
                             std::sqrt(static_cast<double>(na - k + 1) * (nb + k));
                }
                if (right == Complex(0.0)) break;
                const int ma = na - k;
                const int mb = nb + k;
                const Complex mid = right * pow_b[ma] * pow_c[mb];
                Complex left = 1.0;
                for (int j = 0; j <= std::min(na_max - ma, mb); ++j) {
                    if (j > 0) {
                        left *= x / static_cast<double>(j) *
                                std::sqrt(static_cast<double>(ma + j) * (mb - j + 1));
                    }
                    if (left == Complex(0.0)) break;
                    out(index(ma + j, mb - j), col) += left * mid;
                }
            }
        }
    }
    return out;
}

double tuned_tau(const OscillatorParams& p, int m, Branch branch) {
    if (m < 1) throw InvalidArgument("tuned_tau: m must be a positive integer");
    const double detuning = p.big_omega - p.omega;
    const double delta = std::sqrt(p.g * p.g + detuning * detuning / 4.0);
    const double mean = 0.5 * (p.big_omega + p.omega);
    const double freq = branch == Branch::plus ? mean + delta : mean - delta;
    if (std::abs(freq) < 1e-12) throw ZeroFrequency("tuned_tau: Omega_pm vanishes");
    return 2.0 * m * std::numbers::pi / std::abs(freq);
}

}  // namespace zenopure::oscillator
