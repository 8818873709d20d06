#pragma once

#include <functional>
#include <vector>

#include "bdsid/linalg.hpp"

namespace bdsid {

/// Applies the (time-dependent) Hermitian generator: out = H(t) * x.
/// Implementations must not alias out with x.
using GeneratorApply = std::function<void(double t, const ComplexVector& x, ComplexVector& out)>;

/// Matrix-valued generator, H(t).
using MatrixGenerator = std::function<ComplexMatrix(double t)>;

struct Trajectory {
    std::vector<double> times;
    std::vector<ComplexVector> states;   // one per sample time
    double max_norm_drift = 0.0;         // max over the run of | ||psi|| - 1 |
};

struct MatrixTrajectory {
    std::vector<double> times;
    std::vector<ComplexMatrix> states;
    double max_trace_drift = 0.0;
};

/// Largest step consistent with resolving the fastest oscillation:
/// min(2*pi / (50 * omega_max), requested).
double integration_step(double omega_max, double requested_dt);

/// Fixed-step classical RK4 for i d|psi>/dt = H(t)|psi>.
/// Samples are taken at the entries of t_grid (ascending, first >= 0);
/// integration starts at t = 0. Aborts when the norm drifts by more
/// than 1e-4 from the initial norm.
Trajectory evolve_timedep(const GeneratorApply& apply_h, const ComplexVector& state0,
                          const std::vector<double>& t_grid, double dt);

Trajectory evolve_timedep(const MatrixGenerator& h_of_t, const ComplexVector& state0,
                          const std::vector<double>& t_grid, double dt);

/// Same integrator for d rho/dt = -i [H(t), rho]. Trace drift is monitored
/// instead of the norm; density matrices are never renormalized mid-run.
MatrixTrajectory evolve_timedep(const MatrixGenerator& h_of_t, const ComplexMatrix& rho0,
                                const std::vector<double>& t_grid, double dt);

std::vector<double> linspace(double t0, double t1, int n);

}  // namespace bdsid
