#ifndef ZENOPURE_OSCILLATOR_HPP
#define ZENOPURE_OSCILLATOR_HPP

#include "zenopure/engine.hpp"
#include "zenopure/linalg.hpp"

// Exactly solvable model: two oscillators a, b with
//   H = Omega a^dag a + omega b^dag b + i g (a^dag b - a b^dag),
// oscillator a repeatedly confirmed in the coherent state |alpha>, oscillator b
// starting thermal. Everything here is closed form; the truncated-Fock
// realizations exist to be compared against the generic engine.
//
// A cutoff n is the highest retained number state, so a mode has n+1 levels.

namespace zenopure::oscillator {

struct OscillatorParams {
    double big_omega = 1.0;
    double omega = 1.0;
    double g = 0.2;
    Complex alpha{0.5, 0.0};
    double beta = 1.0;
    double tau = 0.0;
    int cutoff_a = 30;
    int cutoff_b = 30;

    /// Throws InvalidArgument / CutoffTooSmall.
    void validate() const;
    /// Smallest admissible cutoff, 4(1+|alpha|^2) rounded up.
    int cutoff_floor() const;

    bool operator==(const OscillatorParams&) const = default;
};

enum class Branch { plus, minus };

/// Omega = omega = 1, g = 0.2, alpha = 0.5, beta = 1, tau = 2 pi / Omega_+.
OscillatorParams figure1_params(int cutoff = 30);

struct ClosedFormCoefficients {
    double delta = 0.0;
    double big_omega_plus = 0.0;
    double big_omega_minus = 0.0;
    Complex a_coef;
    Complex exp_b;
    Complex exp_c;
    Complex exp_neg_c;
    Complex lambda0;            // exponential form
    Complex lambda0_cotangent;  // cotangent form; NaN where a cotangent diverges badly
    Complex a_ratio;            // A / (1 - e^{-C})
    Complex alpha_tilde;        // A alpha / (1 - e^{-C})
    Complex lowering_shift;     // A alpha^* / (1 - e^{-C})
    double abs_exp_c = 1.0;     // sqrt(1 - (g/delta)^2 sin^2(delta tau))
    // cos(delta tau) + i (Omega - omega)/(2 delta) sin(delta tau) = 0: the modes swap
    // completely, A, e^B, e^{-C} are NaN and e^C = 0. The remaining fields stay finite.
    bool exchange_complete = false;
};

enum class IntervalCheck { strict, lenient };

/// Branch-free evaluation: e^B, e^C and e^{-C} are formed from cos/sin and a
/// phase, never from a complex logarithm.
/// strict: throws DegenerateInterval when delta*tau is a multiple of pi or 1 - e^{-C} vanishes.
/// lenient: never throws; quantities that are genuinely singular come back NaN.
ClosedFormCoefficients coefficients(const OscillatorParams& p,
                                    IntervalCheck check = IntervalCheck::strict);

Complex lambda_n(const ClosedFormCoefficients& c, int n);

/// Right eigenvector U|n) of V, unit-normalized, U = exp[s (alpha^* b + alpha b^dag)].
ComplexVector eigenvector_u_n(const ClosedFormCoefficients& c, int n, int cutoff);

/// lambda0 * U e^{C b^dag b} U^{-1} on cutoff+1 levels: V_alpha(tau) in closed form.
ComplexMatrix closed_form_projected_propagator(const ClosedFormCoefficients& c, int cutoff);

ComplexMatrix annihilation(int cutoff);

BipartiteSystem build_hamiltonian(const OscillatorParams& p);

/// Fock amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!), not renormalized.
ComplexVector coherent_state(Complex alpha, int cutoff);

/// e^{-|alpha|^2} sum_{n > cutoff} |alpha|^{2n} / n!
double coherent_tail_mass(Complex alpha, int cutoff);

DensityMatrix thermal_state(double beta, double omega, int cutoff);

ProbeState probe_state(const OscillatorParams& p);

struct ThermalTrajectoryClosedForm {
    int n = 0;
    Complex theta;
    Complex displacement_argument;  // gamma in D(N) = exp(gamma b^dag - gamma^* b)
    double gauge_norm = 1.0;        // 1 - |e^C|^{2N} e^{-beta omega}
    DensityMatrix state;
};

/// Exact state of oscillator b after n confirmations for a thermal start.
ThermalTrajectoryClosedForm closed_form_rho(const OscillatorParams& p, int n);

/// e^{A a^dag b} e^{B a^dag a} e^{C b^dag b} e^{-A a b^dag} on the truncated two-mode space.
ComplexMatrix factorized_propagator(const OscillatorParams& p);

/// 2 m pi / |Omega_pm|
double tuned_tau(const OscillatorParams& p, int m, Branch branch);

}  // namespace zenopure::oscillator

#endif  // ZENOPURE_OSCILLATOR_HPP
