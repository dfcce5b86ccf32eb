#include "zenopure/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "zenopure/engine.hpp"
#include "zenopure/oscillator.hpp"

namespace zenopure {

namespace {

namespace osc = oscillator;

constexpr double kReferenceGapRatio = 0.37;

struct Model {
    std::optional<osc::OscillatorParams> params;  // oscillator model only, tau resolved
    std::optional<BipartiteSystem> system;        // absent for an explicit propagator
    std::optional<ComplexMatrix> total_propagator;
    Index dim_a = 0;
    Index dim_b = 0;
    std::optional<ProbeState> probe;
    double tau = 0.0;
    std::optional<DensityMatrix> rho0;
};

std::optional<double> env_tolerance() {
    const char* raw = std::getenv("ZENOPURE_TOL");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string("ZENOPURE_TOL must be a positive number, got '") + raw + "'");
    }
    return v;
}

std::optional<double> tolerance_override(const RunOptions& opts) {
    if (opts.tol) return opts.tol;
    return env_tolerance();
}

DensityMatrix initial_state(const ExperimentConfig& cfg, const Model& m) {
    const std::string& s = cfg.initial_state;
    if (s == "thermal") {
        if (!m.params) throw ConfigError("thermal initial state needs the oscillator model");
        return osc::thermal_state(m.params->beta, m.params->omega, m.params->cutoff_b);
    }
    if (s == "maximally-mixed") return DensityMatrix::maximally_mixed(m.dim_b);
    if (s.rfind("mixed:", 0) == 0) {
        const long levels = std::stol(s.substr(6));
        if (levels > m.dim_b) throw ConfigError("initial_state " + s + " exceeds dim_b");
        return DensityMatrix::mixed_over_levels(m.dim_b, levels);
    }
    if (s.rfind("fock:", 0) == 0) {
        const long k = std::stol(s.substr(5));
        if (k >= m.dim_b) throw ConfigError("initial_state " + s + " exceeds dim_b");
        ComplexVector e = ComplexVector::Zero(m.dim_b);
        e[k] = 1.0;
        return DensityMatrix::pure(e);
    }
    throw ConfigError("unknown initial_state '" + s + "'");
}

Model realize(const ExperimentConfig& cfg) {
    Model m;
    if (cfg.model == ModelKind::oscillator) {
        osc::OscillatorParams p = cfg.oscillator;
        if (const auto* tuned = std::get_if<TunedTau>(&cfg.tau)) {
            p.tau = osc::tuned_tau(p, tuned->m, tuned->branch);
        } else {
            p.tau = std::get<double>(cfg.tau);
        }
        p.validate();
        m.params = p;
        m.system = osc::build_hamiltonian(p);
        m.dim_a = p.cutoff_a + 1;
        m.dim_b = p.cutoff_b + 1;
        m.probe = osc::probe_state(p);
        m.tau = p.tau;
    } else {
        if (std::holds_alternative<TunedTau>(cfg.tau)) {
            throw ConfigError("tuned tau is only defined for the oscillator model");
        }
        m.tau = std::get<double>(cfg.tau);
        MatrixFile file = load_matrix_file(cfg.matrix_file);
        m.dim_a = file.dim_a;
        m.dim_b = file.dim_b;
        if (static_cast<Index>(cfg.probe.size()) != m.dim_a) {
            throw ConfigError("probe has " + std::to_string(cfg.probe.size()) +
                              " amplitudes, matrix file declares dim_a = " + std::to_string(m.dim_a));
        }
        ComplexVector phi(m.dim_a);
        for (Index i = 0; i < m.dim_a; ++i) phi[i] = cfg.probe[static_cast<std::size_t>(i)];
        m.probe.emplace(std::move(phi));
        if (cfg.matrix_kind == MatrixKind::hamiltonian) {
            m.system.emplace(file.dim_a, file.dim_b, std::move(file.matrix));
        } else {
            m.total_propagator = std::move(file.matrix);
        }
    }
    m.rho0 = initial_state(cfg, m);
    return m;
}

ProjectedPropagator projected(const Model& m) {
    if (m.system) return build_projected_propagator(*m.system, *m.probe, m.tau);
    return ProjectedPropagator(contract_probe(*m.total_propagator, m.dim_a, m.dim_b,
                                              m.probe->amplitudes()),
                               m.tau);
}

std::string fmt(double x) { return format_number(x); }
std::string fmt_bool(bool b) { return b ? "true" : "false"; }

void complex_row(std::ostream& out, const std::string& name, Complex z) {
    out << name << "," << fmt(z.real()) << "," << fmt(z.imag()) << "\n";
}

PowerIterationOptions power_options(const ExperimentConfig& cfg) {
    PowerIterationOptions o;
    o.seed = cfg.seed;
    return o;
}

}  // namespace

ExperimentConfig figure1_config() {
    ExperimentConfig cfg;
    cfg.model = ModelKind::oscillator;
    cfg.oscillator = osc::figure1_params(30);
    cfg.oscillator.tau = 0.0;
    cfg.tau = TunedTau{1, osc::Branch::plus};
    cfg.n_steps = 10;
    cfg.initial_state = "thermal";
    cfg.outputs = {"purify"};
    cfg.total_time = osc::tuned_tau(cfg.oscillator, 1, osc::Branch::plus);
    cfg.zeno_n = {1, 2, 4, 8, 16, 32};
    return cfg;
}

ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOptions& opts) {
    if (opts.cutoff) {
        if (*opts.cutoff < 1) throw ConfigError("--cutoff must be >= 1");
        if (cfg.model != ModelKind::oscillator) throw ConfigError("--cutoff applies to the oscillator model only");
        cfg.oscillator.cutoff_a = cfg.oscillator.cutoff_b = *opts.cutoff;
    }
    if (opts.steps) {
        if (*opts.steps < 1) throw ConfigError("--steps must be >= 1");
        cfg.n_steps = *opts.steps;
    }
    if (opts.seed) cfg.seed = *opts.seed;
    return cfg;
}

int cmd_spectrum(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out) {
    const Model m = realize(cfg);
    const ProjectedPropagator v = projected(m);
    const double epsilon = tolerance_override(opts).value_or(kConditionEpsilon);
    const ConditionsReport rep = spectral_report(v, *m.rho0, epsilon, power_options(cfg));

    out << "quantity,value,imag\n";
    complex_row(out, "lambda0", rep.lambda0);
    out << "abs_lambda0," << fmt(std::abs(rep.lambda0)) << ",0\n";
    if (rep.lambda1) {
        complex_row(out, "lambda1", *rep.lambda1);
    } else {
        out << "lambda1,nan,nan\n";
    }
    out << "gap_ratio," << fmt(rep.gap_ratio) << ",0\n";
    out << "condition_I_met," << fmt_bool(rep.condition_i_met) << ",\n";
    out << "condition_II_ratio," << fmt(rep.condition_ii_ratio) << ",0\n";
    out << "yield_plateau_coefficient," << fmt(rep.yield_plateau_coefficient) << ",0\n";
    out << "degenerate," << fmt_bool(rep.degenerate) << ",\n";

    if (m.params) {
        try {
            const auto c = osc::coefficients(*m.params);
            complex_row(out, "closed_form_lambda0", c.lambda0);
            complex_row(out, "closed_form_lambda0_cotangent", c.lambda0_cotangent);
            out << "closed_form_abs_exp_c," << fmt(c.abs_exp_c) << ",0\n";
            const int k = static_cast<int>(std::min<Index>(4, v.dim()));
            const EigenPairSequence seq = top_k_eigenpairs(v.matrix(), k, power_options(cfg));
            out << "\nn,numeric_re,numeric_im,closed_re,closed_im,abs_error\n";
            for (std::size_t n = 0; n < seq.pairs.size(); ++n) {
                const Complex num = seq.pairs[n].value;
                const Complex closed = osc::lambda_n(c, static_cast<int>(n));
                out << n << "," << fmt(num.real()) << "," << fmt(num.imag()) << ","
                    << fmt(closed.real()) << "," << fmt(closed.imag()) << ","
                    << fmt(std::abs(num - closed)) << "\n";
            }
        } catch (const DegenerateInterval& e) {
            out << "# closed form unavailable: " << e.what() << "\n";
        }
    }
    return rep.degenerate ? kExitDegenerate : kExitOk;
}

int cmd_purify(const ExperimentConfig& cfg, const RunOptions&, std::ostream& out) {
    const Model m = realize(cfg);
    const ProjectedPropagator v = projected(m);
    std::optional<ComplexVector> target;
    if (m.params) {
        try {
            const auto c = osc::coefficients(*m.params);
            target = osc::coherent_state(c.alpha_tilde, m.params->cutoff_b).normalized();
        } catch (const DegenerateInterval&) {
            target.reset();
        }
    }
    const PurificationTrajectory traj =
        run_purification(*m.rho0, v, cfg.n_steps, target, power_options(cfg));
    std::optional<ComplexMatrix> target_proj;
    if (traj.target.size() > 0) target_proj = traj.target * traj.target.adjoint();

    out << "N,conditional_probability,yield,fidelity,purity,trace_distance_to_target\n";
    for (const auto& s : traj.steps) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double td = target_proj ? trace_distance(s.state.matrix(), *target_proj) : nan;
        out << s.n << "," << fmt(s.conditional_probability) << "," << fmt(s.cumulative_yield) << ","
            << fmt(s.fidelity.value_or(nan)) << "," << fmt(s.purity) << "," << fmt(td) << "\n";
    }
    if (traj.extinct) {
        out << "# extinct branch at N=" << traj.extinct_at
            << ": confirmation probability below threshold, trajectory truncated\n";
    }
    return kExitOk;
}

int cmd_compare(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out) {
    if (cfg.model != ModelKind::oscillator) throw ConfigError("compare needs the oscillator model");
    CompareTolerances tol;
    if (const auto t = tolerance_override(opts)) tol = {*t, *t, *t, *t};

    std::optional<Model> realized;
    try {
        realized = realize(cfg);
    } catch (const CutoffTooSmall& e) {
        // the probe itself does not fit: every comparison is out of tolerance
        out << "check,max_deviation,tolerance,status\n";
        out << "# " << e.what() << "\n";
        out << "truncation,inf," << fmt(tol.propagator) << ",breach\n";
        return kExitToleranceBreach;
    }
    const Model& m = *realized;
    const osc::OscillatorParams& p = *m.params;

    bool breach = false;
    auto check = [&](const std::string& name, double dev, double limit) {
        const bool ok = dev <= limit;
        breach = breach || !ok;
        out << name << "," << fmt(dev) << "," << fmt(limit) << "," << (ok ? "ok" : "breach") << "\n";
    };

    out << "check,max_deviation,tolerance,status\n";

    // Product form against the spectral exponential, interior Fock block.
    const HermitianEigenDecomposition eig = hermitian_eigendecompose(m.system->hamiltonian());
    const ComplexMatrix u = unitary_exponential(eig, p.tau);
    const ComplexMatrix fact = osc::factorized_propagator(p);
    const int interior = std::min({12, p.cutoff_a - 1, p.cutoff_b - 1});
    double fact_dev = 0.0;
    const Index db = p.cutoff_b + 1;
    for (int ra = 0; ra <= interior; ++ra)
        for (int rb = 0; rb <= interior; ++rb)
            for (int ca = 0; ca <= interior; ++ca)
                for (int cb = 0; cb <= interior; ++cb) {
                    const Index r = ra * db + rb;
                    const Index c = ca * db + cb;
                    fact_dev = std::max(fact_dev, std::abs(fact(r, c) - u(r, c)));
                }
    check("factorization_interior", fact_dev, tol.factorization);

    osc::ClosedFormCoefficients coef;
    try {
        coef = osc::coefficients(p);
    } catch (const DegenerateInterval& e) {
        out << "# closed-form coefficients unavailable: " << e.what() << "\n";
        return kExitDegenerate;
    }

    const ProjectedPropagator v(contract_probe(u, m.dim_a, m.dim_b, m.probe->amplitudes()), p.tau);
    const ComplexMatrix oracle = osc::closed_form_projected_propagator(coef, p.cutoff_b);
    const int low = std::min(10, p.cutoff_b - 1);
    check("propagator_low_block",
          (v.matrix() - oracle).topLeftCorner(low + 1, low + 1).cwiseAbs().maxCoeff(), tol.propagator);

    const DensityMatrix thermal = osc::thermal_state(p.beta, p.omega, p.cutoff_b);
    const PurificationTrajectory traj = run_purification(thermal, v, cfg.n_steps, std::nullopt,
                                                         power_options(cfg));
    double traj_dev = 0.0;
    for (const auto& step : traj.steps) {
        double d = std::numeric_limits<double>::infinity();
        try {
            d = trace_distance(step.state.matrix(), osc::closed_form_rho(p, step.n).state.matrix());
        } catch (const CutoffTooSmall& e) {
            out << "# step " << step.n << ": " << e.what() << "\n";
        }
        out << "trajectory_step_" << step.n << "," << fmt(d) << "," << fmt(tol.trajectory) << ","
            << (d <= tol.trajectory ? "ok" : "breach") << "\n";
        traj_dev = std::max(traj_dev, d);
    }
    if (traj.extinct) out << "# engine trajectory extinct at N=" << traj.extinct_at << "\n";
    check("trajectory_max", traj_dev, tol.trajectory);

    if (coef.abs_exp_c >= 1.0 - 1e-12) {
        out << "geometric_spectrum,nan," << fmt(tol.geometric) << ",skipped (|e^C| = 1, no gap)\n";
    } else {
        const int k = static_cast<int>(std::min<Index>(6, v.dim()));
        const EigenPairSequence seq = top_k_eigenpairs(v.matrix(), k, power_options(cfg));
        double geo_dev = seq.truncated ? std::numeric_limits<double>::infinity() : 0.0;
        for (std::size_t n = 0; n + 1 < seq.pairs.size(); ++n) {
            const Complex ratio = seq.pairs[n + 1].value / seq.pairs[n].value;
            geo_dev = std::max(geo_dev, std::abs(ratio - coef.exp_c));
        }
        check("geometric_spectrum", geo_dev, tol.geometric);
        if (seq.pairs.size() >= 2) {
            const double numeric_gap = std::abs(seq.pairs[1].value / seq.pairs[0].value);
            out << "\nquantity,value\n";
            out << "gap_ratio_numeric," << fmt(numeric_gap) << "\n";
            out << "gap_ratio_closed_form," << fmt(coef.abs_exp_c) << "\n";
            out << "gap_ratio_reference_unasserted," << fmt(kReferenceGapRatio) << "\n";
        }
        out << "\nn,numeric_re,numeric_im,closed_re,closed_im\n";
        for (std::size_t n = 0; n < seq.pairs.size(); ++n) {
            const Complex closed = osc::lambda_n(coef, static_cast<int>(n));
            out << n << "," << fmt(seq.pairs[n].value.real()) << "," << fmt(seq.pairs[n].value.imag())
                << "," << fmt(closed.real()) << "," << fmt(closed.imag()) << "\n";
        }
    }
    return breach ? kExitToleranceBreach : kExitOk;
}

int cmd_zeno(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out) {
    if (!cfg.total_time) throw ConfigError("zeno needs total_time in the config");
    if (cfg.zeno_n.empty()) throw ConfigError("zeno needs zeno_n in the config");
    const Model m = realize(cfg);
    if (!m.system) throw ConfigError("zeno needs a Hamiltonian, not an explicit propagator");
    const auto points = zeno_limit_scan(*m.system, *m.probe, *m.rho0, *cfg.total_time, cfg.zeno_n,
                                        std::max(1, opts.jobs));
    out << "n,tau,yield,unitarity_defect\n";
    for (const auto& pt : points) {
        out << pt.n << "," << fmt(pt.tau) << "," << fmt(pt.yield) << "," << fmt(pt.unitarity_defect)
            << "\n";
    }
    return kExitOk;
}

int run_command(const std::string& name, const ExperimentConfig& cfg, const RunOptions& opts,
                std::ostream& out, std::ostream& err) {
    try {
        if (name == "figure1") return cmd_purify(apply_overrides(figure1_config(), opts), opts, out);
        const ExperimentConfig c = apply_overrides(cfg, opts);
        if (name == "spectrum") return cmd_spectrum(c, opts, out);
        if (name == "purify") return cmd_purify(c, opts, out);
        if (name == "compare") return cmd_compare(c, opts, out);
        if (name == "zeno") return cmd_zeno(c, opts, out);
        err << "unknown command '" << name << "'\n";
        return kExitConfigError;
    } catch (const DegenerateInterval& e) {
        err << "degenerate: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const NoConvergence& e) {
        err << "degenerate spectrum: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

}  // namespace zenopure
