#include "bdsid/propagate.hpp"

#include <cmath>
#include <stdexcept>

namespace bdsid {

namespace {

constexpr double kAbortDrift = 1e-4;

void check_grid(const std::vector<double>& t_grid, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_timedep: dt must be positive");
    if (t_grid.empty()) throw std::invalid_argument("evolve_timedep: empty time grid");
    if (t_grid.front() < 0.0) throw std::invalid_argument("evolve_timedep: grid starts before 0");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (t_grid[k] <= t_grid[k - 1])
            throw std::invalid_argument("evolve_timedep: time grid is not ascending");
}

[[noreturn]] void abort_drift(double drift, double t) {
    throw std::runtime_error("evolve_timedep: norm/trace drift " + std::to_string(drift) +
                             " at t=" + std::to_string(t) +
                             " exceeds 1e-4; use a smaller dt");
}

// Advance from t0 to t1 in steps of at most dt, landing exactly on t1.
template <typename State, typename Rhs>
void advance(State& y, double t0, double t1, double dt, const Rhs& rhs, State& k1, State& k2,
             State& k3, State& k4, State& tmp) {
    double span = t1 - t0;
    if (span <= 0.0) return;
    int n = std::max(1, int(std::ceil(span / dt - 1e-12)));
    double h = span / n;
    for (int s = 0; s < n; ++s) {
        double t = t0 + s * h;
        rhs(t, y, k1);
        tmp = y + (h / 2.0) * k1;
        rhs(t + h / 2.0, tmp, k2);
        tmp = y + (h / 2.0) * k2;
        rhs(t + h / 2.0, tmp, k3);
        tmp = y + h * k3;
        rhs(t + h, tmp, k4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
}

}  // namespace

double integration_step(double omega_max, double requested_dt) {
    if (!(requested_dt > 0.0)) throw std::invalid_argument("integration_step: dt must be positive");
    if (omega_max <= 0.0) return requested_dt;
    return std::min(2.0 * M_PI / (50.0 * omega_max), requested_dt);
}

Trajectory evolve_timedep(const GeneratorApply& apply_h, const ComplexVector& state0,
                          const std::vector<double>& t_grid, double dt) {
    check_grid(t_grid, dt);
    Trajectory out;
    out.times = t_grid;
    out.states.reserve(t_grid.size());

    ComplexVector y = state0;
    ComplexVector k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
    const double norm0 = state0.norm();
    auto rhs = [&](double t, const ComplexVector& x, ComplexVector& o) {
        apply_h(t, x, o);
        o *= cxd(0.0, -1.0);
    };

    double t_prev = 0.0;
    for (double ts : t_grid) {
        advance(y, t_prev, ts, dt, rhs, k1, k2, k3, k4, tmp);
        t_prev = ts;
        double drift = std::abs(y.norm() - norm0);
        out.max_norm_drift = std::max(out.max_norm_drift, drift);
        if (drift > kAbortDrift) abort_drift(drift, ts);
        out.states.push_back(y);
    }
    return out;
}

Trajectory evolve_timedep(const MatrixGenerator& h_of_t, const ComplexVector& state0,
                          const std::vector<double>& t_grid, double dt) {
    GeneratorApply apply = [&](double t, const ComplexVector& x, ComplexVector& o) {
        o.noalias() = h_of_t(t) * x;
    };
    return evolve_timedep(apply, state0, t_grid, dt);
}

MatrixTrajectory evolve_timedep(const MatrixGenerator& h_of_t, const ComplexMatrix& rho0,
                                const std::vector<double>& t_grid, double dt) {
    check_grid(t_grid, dt);
    if (rho0.rows() != rho0.cols())
        throw std::invalid_argument("evolve_timedep: density matrix not square");

    MatrixTrajectory out;
    out.times = t_grid;
    out.states.reserve(t_grid.size());

    ComplexMatrix y = rho0;
    const Eigen::Index n = rho0.rows();
    ComplexMatrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n);
    const double trace0 = rho0.trace().real();
    auto rhs = [&](double t, const ComplexMatrix& x, ComplexMatrix& o) {
        ComplexMatrix h = h_of_t(t);
        o.noalias() = h * x;
        o.noalias() -= x * h;
        o *= cxd(0.0, -1.0);
    };

    double t_prev = 0.0;
    for (double ts : t_grid) {
        advance(y, t_prev, ts, dt, rhs, k1, k2, k3, k4, tmp);
        t_prev = ts;
        double drift = std::abs(y.trace().real() - trace0) + std::abs(y.trace().imag());
        out.max_trace_drift = std::max(out.max_trace_drift, drift);
        if (drift > kAbortDrift) abort_drift(drift, ts);
        out.states.push_back(y);
    }
    return out;
}

std::vector<double> linspace(double t0, double t1, int n) {
    if (n < 2 || !(t1 > t0)) throw std::invalid_argument("linspace: need n >= 2 and t1 > t0");
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = t0 + (t1 - t0) * double(k) / double(n - 1);
    return out;
}

}  // namespace bdsid
