#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bdsid/bell_protocol.hpp"
#include "bdsid/cavity_qed.hpp"
#include "bdsid/linalg.hpp"
#include "bdsid/propagate.hpp"
#include "bdsid/shot_sampler.hpp"

namespace py = pybind11;
using namespace bdsid;

namespace {

StepId step_from_int(int step) {
    if (step < 1 || step > 3) throw std::invalid_argument("step must be 1, 2 or 3");
    return static_cast<StepId>(step);
}

BellCoefficients coeffs_from_list(const std::array<double, 4>& c) {
    return BellCoefficients(c);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Nondestructive Bell-diagonal-state identification: protocol algebra, "
              "finite-shot sampling and the cavity-QED realization.";

    py::class_<BellCoefficients>(m, "BellCoefficients")
        .def(py::init<double, double, double, double>())
        .def_property_readonly("c", [](const BellCoefficients& b) { return b.c; })
        .def("__getitem__", [](const BellCoefficients& b, int i) {
            if (i < 0 || i > 3) throw py::index_error();
            return b[i];
        })
        .def("__repr__", [](const BellCoefficients& b) {
            return "BellCoefficients(" + std::to_string(b[0]) + ", " + std::to_string(b[1]) +
                   ", " + std::to_string(b[2]) + ", " + std::to_string(b[3]) + ")";
        });

    py::class_<ProtocolStepReport>(m, "ProtocolStepReport")
        .def_readonly("probe_state", &ProtocolStepReport::probe_state)
        .def_readonly("m_value", &ProtocolStepReport::m_value)
        .def_readonly("post_bds", &ProtocolStepReport::post_bds)
        .def_property_readonly("step", [](const ProtocolStepReport& r) {
            return static_cast<int>(r.step);
        })
        .def_property_readonly("probe_basis", [](const ProtocolStepReport& r) {
            return r.probe_basis == ProbeBasis::SigmaX ? "sigma_x" : "sigma_z";
        });

    py::class_<IdentificationResult>(m, "IdentificationResult")
        .def_readonly("m", &IdentificationResult::m)
        .def_readonly("recovered", &IdentificationResult::recovered)
        .def_readonly("was_projected", &IdentificationResult::was_projected)
        .def_readonly("residual_trace_distance",
                      &IdentificationResult::residual_trace_distance);

    py::class_<EstimateReport>(m, "EstimateReport")
        .def_readonly("m_hat", &EstimateReport::m_hat)
        .def_readonly("c_hat", &EstimateReport::c_hat)
        .def_readonly("was_projected", &EstimateReport::was_projected)
        .def_readonly("std_err", &EstimateReport::std_err)
        .def_readonly("shots_used", &EstimateReport::shots_used);

    py::class_<EffectiveCoefficients>(m, "EffectiveCoefficients")
        .def_readonly("j1", &EffectiveCoefficients::j1)
        .def_readonly("j2", &EffectiveCoefficients::j2)
        .def_readonly("b_field", &EffectiveCoefficients::b_field)
        .def_readonly("lam", &EffectiveCoefficients::lam);

    py::class_<TimeSeries>(m, "TimeSeries")
        .def_readonly("times", &TimeSeries::times)
        .def_readonly("full_values", &TimeSeries::full_values)
        .def_readonly("effective_values", &TimeSeries::effective_values)
        .def_property_readonly("observable", [](const TimeSeries& t) {
            return t.observable == ProbeBasis::SigmaX ? "sigma_x" : "sigma_z";
        });

    py::class_<SimulationComparison>(m, "SimulationComparison")
        .def_readonly("series", &SimulationComparison::series)
        .def_readonly("max_deviation", &SimulationComparison::max_deviation)
        .def_readonly("mean_excited_population",
                      &SimulationComparison::mean_excited_population)
        .def_readonly("mean_photon_population",
                      &SimulationComparison::mean_photon_population)
        .def_readonly("mean_leakage", &SimulationComparison::mean_leakage);

    py::class_<GateFidelityResult>(m, "GateFidelityResult")
        .def_readonly("fidelity", &GateFidelityResult::fidelity)
        .def_readonly("leakage", &GateFidelityResult::leakage)
        .def_readonly("gate_time", &GateFidelityResult::gate_time)
        .def_readonly("lambda_used", &GateFidelityResult::lambda_used)
        .def_readonly("outside_adiabatic_validity",
                      &GateFidelityResult::outside_adiabatic_validity);

    py::class_<CavityBaseConfig>(m, "CavityBaseConfig")
        .def(py::init([](double g_a, double omega_ra, double delta_a, double delta_b0,
                         double Delta_a, double Delta_b0, double delta_1, int n_ph) {
                 CavityBaseConfig c;
                 c.g_a = g_a;
                 c.omega_ra = omega_ra;
                 c.delta_a = delta_a;
                 c.delta_b0 = delta_b0;
                 c.Delta_a = Delta_a;
                 c.Delta_b0 = Delta_b0;
                 c.delta_1 = delta_1;
                 c.n_ph = n_ph;
                 return c;
             }),
             py::arg("g_a"), py::arg("omega_ra"), py::arg("delta_a"), py::arg("delta_b0"),
             py::arg("Delta_a"), py::arg("Delta_b0"), py::arg("delta_1") = 0.0,
             py::arg("n_ph") = 2);

    py::class_<CavityParams>(m, "CavityParams")
        .def_readonly("g_a", &CavityParams::g_a)
        .def_readonly("g_b", &CavityParams::g_b)
        .def_readonly("omega_ra", &CavityParams::omega_ra)
        .def_readonly("omega_rb", &CavityParams::omega_rb)
        .def_readonly("delta_a", &CavityParams::delta_a)
        .def_readonly("delta_b", &CavityParams::delta_b)
        .def_readonly("Delta_a", &CavityParams::Delta_a)
        .def_readonly("Delta_b", &CavityParams::Delta_b)
        .def_readonly("delta_1", &CavityParams::delta_1)
        .def_readonly("n_ph", &CavityParams::n_ph);

    // linear algebra
    m.def("kron",
          py::overload_cast<const ComplexMatrix&, const ComplexMatrix&>(&kron),
          py::arg("a"), py::arg("b"));
    m.def("partial_trace",
          [](const ComplexMatrix& rho, const std::vector<Eigen::Index>& dims,
             const std::vector<int>& keep) {
              return partial_trace(rho, TensorSpace(dims), keep);
          },
          py::arg("rho"), py::arg("dims"), py::arg("keep"));
    m.def("matexp_unitary", &matexp_unitary, py::arg("h"), py::arg("t"));
    m.def("trace_distance", &trace_distance, py::arg("rho"), py::arg("sigma"));
    m.def("gate_fidelity_phase_invariant", &gate_fidelity_phase_invariant,
          py::arg("u"), py::arg("v"));

    // protocol
    m.def("bell_state", &bell_state, py::arg("i"));
    m.def("bds_density",
          [](const std::array<double, 4>& c) { return bds_density(coeffs_from_list(c)); },
          py::arg("c"));
    m.def("build_step_unitary",
          [](int step) { return build_step_unitary(step_from_int(step)); }, py::arg("step"));
    m.def("build_bipartite_factors",
          [](int step) { return build_bipartite_factors(step_from_int(step)); },
          py::arg("step"));
    m.def("apply_step",
          [](const ComplexMatrix& rho, int step) {
              return apply_step(rho, step_from_int(step));
          },
          py::arg("rho12"), py::arg("step"));
    m.def("recover_coefficients",
          [](double m1, double m2, double m3) {
              CoefficientRecovery r = recover_coefficients(m1, m2, m3);
              return py::make_tuple(r.coefficients, r.was_projected);
          },
          py::arg("m1"), py::arg("m2"), py::arg("m3"));
    m.def("run_ideal_identification",
          [](const std::array<double, 4>& c) {
              return run_ideal_identification(coeffs_from_list(c));
          },
          py::arg("c"));

    // sampling
    m.def("outcome_probability",
          [](int step, const std::array<double, 4>& c) {
              return outcome_probability(step_from_int(step), coeffs_from_list(c));
          },
          py::arg("step"), py::arg("c"));
    m.def("sample_step",
          [](int step, const std::array<double, 4>& c, std::uint64_t shots,
             std::uint64_t seed, bool recovery) {
              StepCounts counts = sample_step(step_from_int(step), coeffs_from_list(c),
                                              ShotPlan{shots, seed, recovery});
              return py::make_tuple(counts.n_plus, counts.n_minus);
          },
          py::arg("step"), py::arg("c"), py::arg("shots"), py::arg("seed") = 0,
          py::arg("include_recovery_shots") = false);
    m.def("estimate",
          [](const std::array<double, 4>& c, std::uint64_t shots, std::uint64_t seed,
             bool recovery) {
              return estimate(coeffs_from_list(c), ShotPlan{shots, seed, recovery});
          },
          py::arg("c"), py::arg("shots"), py::arg("seed") = 0,
          py::arg("include_recovery_shots") = false);

    // cavity QED
    m.def("make_cavity_params",
          [](const CavityBaseConfig& config, int step) {
              return make_cavity_params(config, step_from_int(step));
          },
          py::arg("config"), py::arg("step"));
    m.def("omega_b_for_step",
          [](int step, const CavityParams& p) {
              return omega_b_for_step(step_from_int(step), p);
          },
          py::arg("step"), py::arg("params"));
    m.def("coefficients_for_step",
          [](int step, const CavityParams& p) {
              return coefficients_for_step(step_from_int(step), p);
          },
          py::arg("step"), py::arg("params"));
    m.def("tune_delta1",
          [](const CavityParams& p, int step) {
              TuneResult r = tune_delta1(p, step_from_int(step));
              return py::make_tuple(r.delta_1, r.params);
          },
          py::arg("params"), py::arg("step"));
    m.def("full_hamiltonian",
          [](const CavityParams& p, int step, double t) {
              return full_hamiltonian(p, step_from_int(step), t);
          },
          py::arg("params"), py::arg("step_frame"), py::arg("t"));
    m.def("effective_hamiltonian",
          [](int step, const EffectiveCoefficients& k) {
              return effective_hamiltonian(step_from_int(step), k);
          },
          py::arg("step"), py::arg("coeffs"));
    m.def("gate_time", &gate_time, py::arg("lam"), py::arg("n") = 0);
    m.def("simulate_comparison",
          [](const CavityParams& p, int step, const ComplexMatrix& init, double t_max,
             int n_samples, double dt) {
              return simulate_comparison(p, step_from_int(step), init, t_max, n_samples, dt);
          },
          py::arg("params"), py::arg("step"), py::arg("init"), py::arg("t_max"),
          py::arg("n_samples"), py::arg("dt") = 1e-3);
    m.def("full_gate_fidelity",
          [](const CavityParams& p, int step, int n, double dt, bool effective_only) {
              return full_gate_fidelity(p, step_from_int(step), n, dt,
                                        effective_only ? Dynamics::Effective
                                                       : Dynamics::Full);
          },
          py::arg("params"), py::arg("step"), py::arg("n") = 0, py::arg("dt") = 1e-3,
          py::arg("effective_only") = false);
}
