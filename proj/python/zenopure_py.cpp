#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zenopure/commands.hpp"
#include "zenopure/config.hpp"
#include "zenopure/engine.hpp"
#include "zenopure/linalg.hpp"
#include "zenopure/oscillator.hpp"

namespace py = pybind11;
using namespace zenopure;
namespace osc = zenopure::oscillator;

namespace {

py::dict pair_dict(const EigenPair& p) {
    py::dict d;
    d["value"] = p.value;
    d["right"] = p.right;
    d["left"] = p.left;
    d["residual"] = p.residual;
    return d;
}

PowerIterationOptions power_options(double tol, long max_iter, std::uint64_t seed) {
    PowerIterationOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    o.seed = seed;
    return o;
}

}  // namespace

PYBIND11_MODULE(_zenopure, m) {
    m.doc() = "Purification by repeated confirmation of a probe system";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DegenerateInterval>(m, "DegenerateInterval", base.ptr());
    py::register_exception<NoConvergence>(m, "NoConvergence", base.ptr());
    py::register_exception<CutoffTooSmall>(m, "CutoffTooSmall", base.ptr());
    py::register_exception<ExtinctBranch>(m, "ExtinctBranch", base.ptr());
    py::register_exception<NotHermitian>(m, "NotHermitian", base.ptr());
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());

    // linear algebra
    m.def("tensor_product", &tensor_product, py::arg("a"), py::arg("b"));
    m.def("unitary_exponential",
          py::overload_cast<const ComplexMatrix&, double>(&unitary_exponential), py::arg("h"),
          py::arg("t"));
    m.def(
        "dominant_eigenpair",
        [](const ComplexMatrix& mat, double tol, long max_iter, std::uint64_t seed) {
            return pair_dict(dominant_eigenpair(mat, power_options(tol, max_iter, seed)));
        },
        py::arg("m"), py::arg("tol") = 1e-10, py::arg("max_iter") = 100000, py::arg("seed") = 0);
    m.def(
        "top_k_eigenpairs",
        [](const ComplexMatrix& mat, int k, double tol, long max_iter, std::uint64_t seed) {
            const auto seq = top_k_eigenpairs(mat, k, power_options(tol, max_iter, seed));
            py::list pairs;
            for (const auto& p : seq.pairs) pairs.append(pair_dict(p));
            py::dict d;
            d["pairs"] = pairs;
            d["truncated"] = seq.truncated;
            d["degenerate"] = seq.degenerate;
            return d;
        },
        py::arg("m"), py::arg("k"), py::arg("tol") = 1e-10, py::arg("max_iter") = 100000,
        py::arg("seed") = 0);

    // engine
    m.def(
        "projected_propagator",
        [](const ComplexMatrix& h, Index dim_a, Index dim_b, const ComplexVector& phi, double tau) {
            return build_projected_propagator(BipartiteSystem(dim_a, dim_b, h), ProbeState(phi), tau).matrix();
        },
        py::arg("hamiltonian"), py::arg("dim_a"), py::arg("dim_b"), py::arg("phi"), py::arg("tau"));
    m.def(
        "evolve_step",
        [](const ComplexMatrix& rho, const ComplexMatrix& v) {
            const auto r = evolve_step(DensityMatrix(rho), ProjectedPropagator(v, 0.0));
            return py::make_tuple(r.state.matrix(), r.probability);
        },
        py::arg("rho"), py::arg("v"));
    m.def(
        "survival_probability",
        [](const ComplexMatrix& rho, const ComplexMatrix& v, int n) {
            return survival_probability(DensityMatrix(rho), ProjectedPropagator(v, 0.0), n);
        },
        py::arg("rho"), py::arg("v"), py::arg("n"));
    m.def(
        "fidelity", [](const ComplexMatrix& rho, const ComplexVector& psi) { return fidelity(DensityMatrix(rho), psi); },
        py::arg("rho"), py::arg("psi"));
    m.def("trace_distance", &trace_distance, py::arg("rho"), py::arg("sigma"));
    m.def(
        "run_purification",
        [](const ComplexMatrix& rho0, const ComplexMatrix& v, int n_max, std::optional<ComplexVector> target) {
            const auto traj = run_purification(DensityMatrix(rho0), ProjectedPropagator(v, 0.0), n_max, target);
            py::list steps;
            for (const auto& s : traj.steps) {
                py::dict d;
                d["n"] = s.n;
                d["conditional_probability"] = s.conditional_probability;
                d["yield"] = s.cumulative_yield;
                d["fidelity"] = s.fidelity;
                d["purity"] = s.purity;
                d["state"] = s.state.matrix();
                steps.append(d);
            }
            py::dict out;
            out["steps"] = steps;
            out["target"] = traj.target;
            out["extinct"] = traj.extinct;
            out["extinct_at"] = traj.extinct_at;
            return out;
        },
        py::arg("rho0"), py::arg("v"), py::arg("n_max"), py::arg("target") = py::none());
    m.def(
        "spectral_report",
        [](const ComplexMatrix& v, const ComplexMatrix& rho0, double epsilon) {
            const auto r = spectral_report(ProjectedPropagator(v, 0.0), DensityMatrix(rho0), epsilon);
            py::dict d;
            d["lambda0"] = r.lambda0;
            d["lambda1"] = r.lambda1;
            d["gap_ratio"] = r.gap_ratio;
            d["yield_plateau_coefficient"] = r.yield_plateau_coefficient;
            d["condition_i_met"] = r.condition_i_met;
            d["condition_ii_ratio"] = r.condition_ii_ratio;
            d["degenerate"] = r.degenerate;
            d["u0"] = r.u0;
            d["v0"] = r.v0;
            return d;
        },
        py::arg("v"), py::arg("rho0"), py::arg("epsilon") = kConditionEpsilon);
    m.def(
        "zeno_limit_scan",
        [](const ComplexMatrix& h, Index dim_a, Index dim_b, const ComplexVector& phi, const ComplexMatrix& rho0,
           double total_time, const std::vector<int>& n_values, int jobs) {
            const auto pts = zeno_limit_scan(BipartiteSystem(dim_a, dim_b, h), ProbeState(phi),
                                             DensityMatrix(rho0), total_time, n_values, jobs);
            py::list out;
            for (const auto& p : pts) {
                py::dict d;
                d["n"] = p.n;
                d["tau"] = p.tau;
                d["yield"] = p.yield;
                d["unitarity_defect"] = p.unitarity_defect;
                out.append(d);
            }
            return out;
        },
        py::arg("hamiltonian"), py::arg("dim_a"), py::arg("dim_b"), py::arg("phi"), py::arg("rho0"),
        py::arg("total_time"), py::arg("n_values"), py::arg("jobs") = 1);

    // oscillator model
    py::enum_<osc::Branch>(m, "Branch").value("plus", osc::Branch::plus).value("minus", osc::Branch::minus);

    py::class_<osc::OscillatorParams>(m, "OscillatorParams")
        .def(py::init<>())
        .def_readwrite("big_omega", &osc::OscillatorParams::big_omega)
        .def_readwrite("omega", &osc::OscillatorParams::omega)
        .def_readwrite("g", &osc::OscillatorParams::g)
        .def_readwrite("alpha", &osc::OscillatorParams::alpha)
        .def_readwrite("beta", &osc::OscillatorParams::beta)
        .def_readwrite("tau", &osc::OscillatorParams::tau)
        .def_readwrite("cutoff_a", &osc::OscillatorParams::cutoff_a)
        .def_readwrite("cutoff_b", &osc::OscillatorParams::cutoff_b)
        .def("validate", &osc::OscillatorParams::validate)
        .def("__repr__", [](const osc::OscillatorParams& p) {
            std::ostringstream s;
            s << "OscillatorParams(big_omega=" << p.big_omega << ", omega=" << p.omega << ", g=" << p.g
              << ", alpha=" << p.alpha << ", beta=" << p.beta << ", tau=" << p.tau << ", cutoff_a=" << p.cutoff_a
              << ", cutoff_b=" << p.cutoff_b << ")";
            return s.str();
        });

    m.def("figure1_params", &osc::figure1_params, py::arg("cutoff") = 30);
    m.def("tuned_tau", &osc::tuned_tau, py::arg("params"), py::arg("m"), py::arg("branch"));
    m.def(
        "coefficients",
        [](const osc::OscillatorParams& p, bool strict) {
            const auto c = osc::coefficients(p, strict ? osc::IntervalCheck::strict : osc::IntervalCheck::lenient);
            py::dict d;
            d["delta"] = c.delta;
            d["big_omega_plus"] = c.big_omega_plus;
            d["big_omega_minus"] = c.big_omega_minus;
            d["a_coef"] = c.a_coef;
            d["exp_b"] = c.exp_b;
            d["exp_c"] = c.exp_c;
            d["exp_neg_c"] = c.exp_neg_c;
            d["lambda0"] = c.lambda0;
            d["lambda0_cotangent"] = c.lambda0_cotangent;
            d["alpha_tilde"] = c.alpha_tilde;
            d["abs_exp_c"] = c.abs_exp_c;
            return d;
        },
        py::arg("params"), py::arg("strict") = true);
    m.def(
        "build_hamiltonian",
        [](const osc::OscillatorParams& p) { return osc::build_hamiltonian(p).hamiltonian(); },
        py::arg("params"));
    m.def(
        "probe_state", [](const osc::OscillatorParams& p) { return osc::probe_state(p).amplitudes(); },
        py::arg("params"));
    m.def("coherent_state", &osc::coherent_state, py::arg("alpha"), py::arg("cutoff"));
    m.def(
        "thermal_state",
        [](double beta, double omega, int cutoff) { return osc::thermal_state(beta, omega, cutoff).matrix(); },
        py::arg("beta"), py::arg("omega"), py::arg("cutoff"));
    m.def(
        "closed_form_rho", [](const osc::OscillatorParams& p, int n) { return osc::closed_form_rho(p, n).state.matrix(); },
        py::arg("params"), py::arg("n"));
    m.def("factorized_propagator", &osc::factorized_propagator, py::arg("params"));

    // command layer
    m.def(
        "run_command",
        [](const std::string& name, const std::string& config_text, std::optional<int> cutoff,
           std::optional<int> steps, std::optional<std::uint64_t> seed, int jobs) {
            ExperimentConfig cfg;
            if (name != "figure1") cfg = parse_config(config_text);
            RunOptions o;
            o.cutoff = cutoff;
            o.steps = steps;
            o.seed = seed;
            o.jobs = jobs;
            std::ostringstream out, err;
            const int code = run_command(name, cfg, o, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("name"), py::arg("config_text") = "", py::arg("cutoff") = py::none(),
        py::arg("steps") = py::none(), py::arg("seed") = py::none(), py::arg("jobs") = 1);
}
