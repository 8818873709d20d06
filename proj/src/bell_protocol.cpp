#include "bdsid/bell_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bdsid {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ComplexMatrix embed_pair(const ComplexMatrix& u4, int a, int b) {
    return embed_operator(u4, TensorSpace{2, 2, 2}, {a, b});
}

}  // namespace

void BellCoefficients::validate() const {
    double sum = 0.0;
    for (double v : c) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("BellCoefficients: component outside [0,1]");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("BellCoefficients: components sum to " + std::to_string(sum) +
                                    ", expected 1");
}

ComplexVector bell_state(int i) {
    ComplexVector v = ComplexVector::Zero(4);
    switch (i) {
        case 1:  // (|10> + |01>)/sqrt2
            v(1) = kInvSqrt2; v(2) = kInvSqrt2; break;
        case 2:  // (|10> - |01>)/sqrt2
            v(1) = -kInvSqrt2; v(2) = kInvSqrt2; break;
        case 3:  // (|11> + |00>)/sqrt2
            v(0) = kInvSqrt2; v(3) = kInvSqrt2; break;
        case 4:  // (|11> - |00>)/sqrt2
            v(0) = -kInvSqrt2; v(3) = kInvSqrt2; break;
        default:
            throw std::invalid_argument("bell_state: index must be 1..4");
    }
    return v;
}

ComplexMatrix bds_density(const BellCoefficients& c) {
    ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
    for (int i = 1; i <= 4; ++i) {
        ComplexVector psi = bell_state(i);
        rho += c[i - 1] * (psi * psi.adjoint());
    }
    return rho;
}

ComplexMatrix build_step_unitary(StepId step) {
    const cxd I = kImag;
    ComplexMatrix u(8, 8);
    switch (step) {
        case StepId::Step1:
            u << 1,  0,  0, -I,  0, -I, -1,  0,
                 0,  1, -I,  0, -I,  0,  0, -1,
                 0, -I,  1,  0, -1,  0,  0, -I,
                -I,  0,  0,  1,  0, -1, -I,  0,
                 0, -I, -1,  0,  1,  0,  0, -I,
                -I,  0,  0, -1,  0,  1, -I,  0,
                -1,  0,  0, -I,  0, -I,  1,  0,
                 0, -1, -I,  0, -I,  0,  0,  1;
            return 0.5 * u;
        case StepId::Step2:
            u << 1,  0,  0,  I,  0,  I,  1,  0,
                 0,  1, -I,  0, -I,  0,  0,  1,
                 0, -I,  1,  0, -1,  0,  0,  I,
                 I,  0,  0,  1,  0, -1, -I,  0,
                 0, -I, -1,  0,  1,  0,  0,  I,
                 I,  0,  0, -1,  0,  1, -I,  0,
                 1,  0,  0, -I,  0, -I,  1,  0,
                 0,  1,  I,  0,  I,  0,  0,  1;
            return 0.5 * u;
        case StepId::Step3: {
            ComplexVector d(8);
            d << -I, I, 1, 1, 1, 1, I, -I;
            return d.asDiagonal();
        }
    }
    throw std::invalid_argument("build_step_unitary: bad step");
}

std::pair<ComplexMatrix, ComplexMatrix> build_bipartite_factors(StepId step) {
    const cxd I = kImag;
    ComplexMatrix u(4, 4);
    switch (step) {
        case StepId::Step1:
            u << 1,  0,  0, -I,
                 0,  1, -I,  0,
                 0, -I,  1,  0,
                -I,  0,  0,  1;
            break;
        case StepId::Step2:
            u << 1,  0,  0,  I,
                 0,  1, -I,  0,
                 0, -I,  1,  0,
                 I,  0,  0,  1;
            break;
        case StepId::Step3:
            u = ComplexMatrix::Zero(4, 4);
            u(0, 0) = cxd(1, -1);
            u(1, 1) = cxd(1, 1);
            u(2, 2) = cxd(1, 1);
            u(3, 3) = cxd(1, -1);
            break;
        default:
            throw std::invalid_argument("build_bipartite_factors: bad step");
    }
    u *= kInvSqrt2;
    return {u, u};  // u13 = u23 for every step
}

ComplexMatrix probe_observable(StepId step) {
    if (step == StepId::Step3) return pauli_x();
    return -pauli_z();  // |1><1| - |0><0|: +1 outcome on |1>
}

ComplexMatrix probe_initial_state(StepId step) {
    ComplexMatrix p(2, 2);
    if (step == StepId::Step3)
        p << 0.5, 0.5, 0.5, 0.5;
    else
        p << 1, 0, 0, 0;
    return p;
}

ProtocolStepReport apply_step(const ComplexMatrix& rho12, StepId step) {
    if (rho12.rows() != 4 || rho12.cols() != 4)
        throw std::invalid_argument("apply_step: expected a 4x4 two-qubit state");
    check_density_matrix(rho12, "apply_step");

    const TensorSpace space{2, 2, 2};
    ComplexMatrix joint = kron(rho12, probe_initial_state(step));
    ComplexMatrix u = build_step_unitary(step);
    joint = u * joint * u.adjoint();

    ProtocolStepReport report;
    report.step = step;
    report.probe_state = partial_trace(joint, space, {2});
    report.post_bds = partial_trace(joint, space, {0, 1});
    report.probe_basis = (step == StepId::Step3) ? ProbeBasis::SigmaX : ProbeBasis::SigmaZ;
    report.m_value = (probe_observable(step) * report.probe_state).trace().real();
    return report;
}

std::pair<ComplexMatrix, ProtocolStepReport> recovery_pass(const ProtocolStepReport& report) {
    ProtocolStepReport second = apply_step(report.post_bds, report.step);
    return {second.post_bds, second};
}

std::array<double, 4> project_to_simplex(const std::array<double, 4>& v) {
    bool inside = true;
    double sum = 0.0;
    for (double x : v) {
        if (x < 0.0) inside = false;
        sum += x;
    }
    if (inside && std::abs(sum - 1.0) <= 1e-12) return v;

    // Sort descending, find the largest k with u_k + (1 - sum_k)/k > 0.
    std::array<double, 4> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0, theta = 0.0;
    for (int k = 0; k < 4; ++k) {
        cumsum += u[k];
        double cand = (1.0 - cumsum) / double(k + 1);
        if (u[k] + cand > 0.0) theta = cand;
    }
    std::array<double, 4> out;
    for (int k = 0; k < 4; ++k) out[k] = std::max(0.0, v[k] + theta);
    return out;
}

CoefficientRecovery recover_coefficients(double m1, double m2, double m3) {
    for (double m : {m1, m2, m3})
        if (!(m >= -1.0 && m <= 1.0))
            throw std::invalid_argument("recover_coefficients: M value outside [-1,1]");
    std::array<double, 4> raw{(m1 + m2 + m3 + 1.0) / 4.0,
                              (1.0 - m1 - m2 + m3) / 4.0,
                              (1.0 + m1 - m2 - m3) / 4.0,
                              (1.0 - m1 + m2 - m3) / 4.0};
    std::array<double, 4> proj = project_to_simplex(raw);
    bool projected = proj != raw;
    return {BellCoefficients(proj), projected};
}

IdentificationResult run_ideal_identification(const BellCoefficients& c) {
    ComplexMatrix bds = bds_density(c);
    const ComplexMatrix original = bds;
    std::array<double, 3> m{};
    for (StepId step : {StepId::Step1, StepId::Step2, StepId::Step3}) {
        ProtocolStepReport report = apply_step(bds, step);
        m[static_cast<int>(step) - 1] = report.m_value;
        bds = recovery_pass(report).first;
    }
    CoefficientRecovery rec = recover_coefficients(m[0], m[1], m[2]);
    return {m, rec.coefficients, rec.was_projected, trace_distance(original, bds)};
}

double m_closed_form(StepId step, const BellCoefficients& c) {
    switch (step) {
        case StepId::Step1: return c[0] + c[2] - c[1] - c[3];
        case StepId::Step2: return c[0] + c[3] - c[1] - c[2];
        case StepId::Step3: return c[0] + c[1] - c[2] - c[3];
    }
    throw std::invalid_argument("m_closed_form: bad step");
}

ComplexMatrix probe_closed_form(StepId step, const BellCoefficients& c) {
    ComplexMatrix p = ComplexMatrix::Zero(2, 2);
    switch (step) {
        case StepId::Step1:
            // Populations in the (|0>,|1>) basis; the |1> weight is c1+c3.
            p(0, 0) = c[1] + c[3];
            p(1, 1) = c[0] + c[2];
            return p;
        case StepId::Step2:
            p(0, 0) = c[1] + c[2];
            p(1, 1) = c[0] + c[3];
            return p;
        case StepId::Step3:
            p(0, 0) = p(1, 1) = 0.5;
            p(0, 1) = p(1, 0) = 0.5 * (c[0] + c[1] - c[2] - c[3]);
            return p;
    }
    throw std::invalid_argument("probe_closed_form: bad step");
}

BellCoefficients exchanged_coefficients(StepId step, const BellCoefficients& c) {
    std::array<double, 4> v = c.c;
    switch (step) {
        case StepId::Step1: std::swap(v[0], v[2]); break;  // Psi1 <-> Psi3
        case StepId::Step2: std::swap(v[0], v[3]); break;  // Psi1 <-> Psi4
        case StepId::Step3: std::swap(v[2], v[3]); break;  // Psi3 <-> Psi4
    }
    return BellCoefficients(v);
}

}  // namespace bdsid
