#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bdsid/bell_protocol.hpp"
#include "bdsid/linalg.hpp"
#include "bdsid/propagate.hpp"

namespace bdsid {

/// Absolute lab frequencies. Never used by the rotating-frame simulation;
/// kept only as documentation of a concrete physical realization.
struct LabFrequencies {
    double omega_e = 0, omega_ab = 0, omega_c = 0, omega_a = 0, omega_b = 0;
};

/// Raw inputs of the driven two-atom/one-cavity model. delta_b0 and Delta_b0
/// are the detunings at delta_1 = 0; the operating values carry +delta_1.
/// All frequencies are in units of g_a, times in 1/g_a.
struct CavityBaseConfig {
    double g_a = 1.0;
    double omega_ra = 0.0;   // Rabi frequency Omega_a
    double delta_a = 0.0;    // atom-cavity detuning on |a> <-> |e>
    double delta_b0 = 0.0;   // atom-cavity detuning on |b> <-> |e> at delta_1 = 0
    double Delta_a = 0.0;    // laser detuning on |a> <-> |e>
    double Delta_b0 = 0.0;   // laser detuning on |b> <-> |e> at delta_1 = 0
    double delta_1 = 0.0;    // frame shift (residual |b><b| term)
    int n_ph = 2;            // photon-space cutoff dimension
    std::optional<LabFrequencies> lab;
};

/// Fully derived operating parameters. g_b always satisfies the matching
/// condition g_a^2/delta_a = g_b^2/delta_b; omega_rb always satisfies the
/// step's selection rule. Construct through make_cavity_params.
struct CavityParams {
    double g_a, g_b;
    double omega_ra, omega_rb;
    double delta_a, delta_b;
    double Delta_a, Delta_b;
    double delta_1;
    int n_ph;
    std::optional<LabFrequencies> lab;
};

struct EffectiveCoefficients {
    double j1, j2;     // exchange amplitudes
    double b_field;    // effective magnetic field B (or B-tilde for step 3)
    double lam;        // coupling of the sigma-sigma form
    StepId step;
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> full_values;
    std::vector<double> effective_values;
    ProbeBasis observable;
};

/// TimeSeries plus the populations the adiabatic approximation neglects.
struct SimulationComparison {
    TimeSeries series;
    double max_deviation;            // max |full - effective| over the grid
    double mean_excited_population;  // time-averaged population of |e> levels
    double mean_photon_population;   // time-averaged population with >= 1 photon
    double mean_leakage;             // time-averaged weight outside qubits x vacuum
    double max_norm_drift;
};

struct TuneResult {
    double delta_1;
    CavityParams params;  // re-derived at the tuned shift
};

enum class Dynamics { Full, Effective };

struct GateFidelityResult {
    double fidelity;
    double leakage;  // mean population outside the qubit (x) vacuum subspace
    double gate_time;
    double lambda_used;
    bool outside_adiabatic_validity;  // leakage > 5%
};

/// Selection-rule Rabi frequency Omega_b making the exchange amplitudes
/// collapse to the step's pure sigma-sigma coupling.
double omega_b_for_step(StepId step, const CavityParams& base);

/// Derive g_b (matching condition), Omega_b (selection rule) and the
/// delta_1-shifted detunings from the raw configuration.
CavityParams make_cavity_params(const CavityBaseConfig& config, StepId step);

/// Re-derive everything at a different frame shift.
CavityParams with_delta1(const CavityParams& params, double delta_1, StepId step);

EffectiveCoefficients coefficients_for_step(StepId step, const CavityParams& params);

/// Soft validity checks of the dispersive treatment; returns human-readable
/// warnings, empty when all hold.
std::vector<std::string> validity_warnings(StepId step, const CavityParams& params);

/// Bisection on [delta_1 - g_a, delta_1 + g_a] driving |B| below
/// 1e-10 * g_a. delta_b, Delta_b, g_b and Omega_b co-vary with the shift.
TuneResult tune_delta1(const CavityParams& params, StepId step);

/// Rotating-frame generator on (atom1 x atom3 x cavity), dimension 9*n_ph.
/// Atom levels are ordered (|a>, |b>, |e>). The generator has the same
/// structural form in the step-3 frame; only the parameter values differ.
ComplexMatrix full_hamiltonian(const CavityParams& params, StepId step_frame, double t);

/// lam * sigma^k x sigma^k on the (|a>,|b>) qubits of the two atoms.
ComplexMatrix effective_hamiltonian(StepId step, const EffectiveCoefficients& coeffs);

/// (2n+1) pi / (4 lam). The realized gate equals the step unitary for even n;
/// odd n composes it with a sigma^k x sigma^k flip (harmless at protocol level).
double gate_time(double lam, int n);

/// Evolve a two-qubit initial state under (i) the full rotating-frame
/// Hamiltonian (mixed states as convex mixtures of eigenbranches, cavity in
/// vacuum, |e> unpopulated) and (ii) the effective sigma-sigma Hamiltonian,
/// recording the probe observable on a shared grid.
SimulationComparison simulate_comparison(const CavityParams& params, StepId step,
                                         const ComplexMatrix& init, double t_max,
                                         int n_samples, double dt_request = 1e-3);

/// Propagate the qubit-subspace basis over one gate time and compare the
/// extracted 4x4 propagator against the step's bipartite factor.
GateFidelityResult full_gate_fidelity(const CavityParams& params, StepId step, int n = 0,
                                      double dt_request = 1e-3,
                                      Dynamics dynamics = Dynamics::Full);

}  // namespace bdsid
