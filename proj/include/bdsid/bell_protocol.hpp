#pragma once

#include <array>
#include <utility>

#include "bdsid/linalg.hpp"

namespace bdsid {

enum class StepId { Step1 = 1, Step2 = 2, Step3 = 3 };

/// Which observable the probe is read out in.
enum class ProbeBasis { SigmaZ, SigmaX };

/// Mixing probabilities (c1..c4) of a Bell diagonal state.
struct BellCoefficients {
    std::array<double, 4> c;

    BellCoefficients(double c1, double c2, double c3, double c4) : c{c1, c2, c3, c4} {
        validate();
    }
    explicit BellCoefficients(const std::array<double, 4>& v) : c(v) { validate(); }

    double operator[](int i) const { return c[i]; }

  private:
    void validate() const;  // each in [0,1], sum 1 within 1e-12
};

struct ProtocolStepReport {
    StepId step;
    ComplexMatrix probe_state;  // 2x2 reduced state of the probe
    double m_value;             // tr(observable * probe_state)
    ComplexMatrix post_bds;     // 4x4 reduced state of qubits 1,2 after the step
    ProbeBasis probe_basis;
};

struct CoefficientRecovery {
    BellCoefficients coefficients;
    bool was_projected;  // true when the raw inversion left the simplex
};

struct IdentificationResult {
    std::array<double, 3> m;
    BellCoefficients recovered;
    bool was_projected;
    double residual_trace_distance;  // original vs post-recovery BDS
};

/// The four Bell states, |Psi_1> .. |Psi_4>, as 4-vectors in the
/// |q1 q2> computational basis (factor 1 most significant).
ComplexVector bell_state(int i);

ComplexMatrix bds_density(const BellCoefficients& c);

/// The 8x8 step unitary on |q1 q2 q3>.
ComplexMatrix build_step_unitary(StepId step);

/// The bipartite factors (u13 acting on qubits {1,3}, u23 on {2,3});
/// embedding and multiplying them reproduces build_step_unitary(step).
std::pair<ComplexMatrix, ComplexMatrix> build_bipartite_factors(StepId step);

/// Probe readout observable of a step. Steps 1-2 measure sigma^z with the
/// +1 outcome on |1>, i.e. |1><1| - |0><0|; step 3 measures sigma^x.
ComplexMatrix probe_observable(StepId step);

/// Fresh probe state for a step: |0><0| for steps 1-2, |+><+| for step 3.
ComplexMatrix probe_initial_state(StepId step);

/// One forward pass: attach a fresh probe, apply the step unitary, and report
/// the probe reduced state, its expectation value and the post-step BDS.
ProtocolStepReport apply_step(const ComplexMatrix& rho12, StepId step);

/// Repeat the step with a fresh probe to undo the Bell-component exchange.
std::pair<ComplexMatrix, ProtocolStepReport> recovery_pass(const ProtocolStepReport& report);

/// Invert the three measurement equations. Components that leave the
/// probability simplex (possible only for inconsistent inputs) are fixed by
/// Euclidean projection onto {c >= 0, sum c = 1} and flagged.
CoefficientRecovery recover_coefficients(double m1, double m2, double m3);

/// Euclidean projection onto the probability simplex (sort-and-threshold).
/// Inputs already on the simplex are returned unchanged.
std::array<double, 4> project_to_simplex(const std::array<double, 4>& v);

/// Steps 1-3, each followed by its recovery pass, on the evolving BDS.
IdentificationResult run_ideal_identification(const BellCoefficients& c);

// Closed forms used by tests and the verification report.
double m_closed_form(StepId step, const BellCoefficients& c);
ComplexMatrix probe_closed_form(StepId step, const BellCoefficients& c);
BellCoefficients exchanged_coefficients(StepId step, const BellCoefficients& c);

}  // namespace bdsid
