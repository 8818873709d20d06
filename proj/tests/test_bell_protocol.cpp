#include <doctest.h>

#include <cmath>

#include "bdsid/bell_protocol.hpp"
#include "test_support.hpp"

using namespace bdsid;
using namespace bdsid::testing;

namespace {

const double s2 = std::sqrt(2.0);

// Independent oracle: the step unitaries as products of commuting
// exponentials, exp(-i pi/4 s_1 s_3) exp(-i pi/4 s_2 s_3).
ComplexMatrix exponential_route(StepId step) {
    ComplexMatrix s;
    switch (step) {
        case StepId::Step1: s = pauli_x(); break;
        case StepId::Step2: s = pauli_y(); break;
        case StepId::Step3: s = pauli_z(); break;
    }
    const TensorSpace q3{2, 2, 2};
    ComplexMatrix g13 = embed_operator(kron(s, s), q3, {0, 2});
    ComplexMatrix g23 = embed_operator(kron(s, s), q3, {1, 2});
    return matexp_unitary(g13, M_PI / 4.0) * matexp_unitary(g23, M_PI / 4.0);
}

}  // namespace

TEST_SUITE_BEGIN("bell_protocol");

TEST_CASE("bell states match the stated sign conventions") {
    ComplexVector psi1 = bell_state(1);
    CHECK(max_abs_diff(psi1, (ComplexVector(4) << 0, 1, 1, 0).finished() / s2) < 1e-15);
    ComplexVector psi4 = bell_state(4);
    CHECK(max_abs_diff(psi4, (ComplexVector(4) << -1, 0, 0, 1).finished() / s2) < 1e-15);
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) {
            cxd overlap = bell_state(i).adjoint() * bell_state(j);
            CHECK(std::abs(overlap - (i == j ? 1.0 : 0.0)) < 1e-15);
        }
    CHECK_THROWS_AS(bell_state(0), std::invalid_argument);
    CHECK_THROWS_AS(bell_state(5), std::invalid_argument);
}

TEST_CASE("bds density examples") {
    CHECK(max_abs_diff(bds_density(BellCoefficients(1, 0, 0, 0)),
                       ComplexMatrix(bell_state(1) * bell_state(1).adjoint())) < 1e-15);
    CHECK(max_abs_diff(bds_density(BellCoefficients(0.25, 0.25, 0.25, 0.25)),
                       0.25 * identity(4)) < 1e-15);

    ComplexMatrix rho = bds_density(BellCoefficients(0.4, 0.3, 0.2, 0.1));
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected(0, 0) = expected(3, 3) = 0.15;
    expected(1, 1) = expected(2, 2) = 0.35;
    expected(0, 3) = expected(3, 0) = 0.05;
    expected(1, 2) = expected(2, 1) = 0.05;
    CHECK(max_abs_diff(rho, expected) < 1e-15);

    // X shape: nothing off the diagonal and anti-diagonal
    SplitMix64 rng(31);
    for (int it = 0; it < 50; ++it) {
        ComplexMatrix r = bds_density(random_simplex(rng));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (i != j && i + j != 3) CHECK(std::abs(r(i, j)) == 0.0);
    }

    CHECK_THROWS_AS(BellCoefficients(0.5, 0.5, 0.5, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(BellCoefficients(0.5, 0.2, 0.2, 0.2), std::invalid_argument);
}

TEST_CASE("step unitaries reproduce the tabulated entries") {
    ComplexMatrix u1 = build_step_unitary(StepId::Step1);
    CHECK(u1(0, 0) == cxd(0.5, 0));
    CHECK(u1(0, 3) == cxd(0, -0.5));
    CHECK(u1(0, 6) == cxd(-0.5, 0));
    CHECK(u1(6, 6) == cxd(0.5, 0));

    ComplexMatrix u2 = build_step_unitary(StepId::Step2);
    CHECK(u2(0, 3) == cxd(0, 0.5));
    CHECK(u2(0, 6) == cxd(0.5, 0));
    CHECK(u2(7, 7) == cxd(0.5, 0));

    ComplexMatrix u3 = build_step_unitary(StepId::Step3);
    ComplexVector d(8);
    d << -kImag, kImag, 1, 1, 1, 1, kImag, -kImag;
    CHECK(max_abs_diff(u3, ComplexMatrix(d.asDiagonal())) == 0.0);

    for (StepId step : {StepId::Step1, StepId::Step2, StepId::Step3})
        CHECK(unitarity_error(build_step_unitary(step)) < 1e-12);
}

TEST_CASE("step unitaries equal the commuting-exponential oracle") {
    for (StepId step : {StepId::Step1, StepId::Step2, StepId::Step3})
        CHECK(max_abs_diff(build_step_unitary(step), exponential_route(step)) < 1e-14);
}

TEST_CASE("bipartite factors embed to the step unitaries") {
    const TensorSpace q3{2, 2, 2};
    for (StepId step : {StepId::Step1, StepId::Step2, StepId::Step3}) {
        auto [u13, u23] = build_bipartite_factors(step);
        CHECK(max_abs_diff(u13, u23) == 0.0);
        ComplexMatrix product = embed_operator(u13, q3, {0, 2}) *
                                embed_operator(u23, q3, {1, 2});
        CHECK(max_abs_diff(product, build_step_unitary(step)) < 1e-14);
    }
    // step-1 factor against the tabulated (I - i XX)/sqrt(2)
    auto [f1, f1b] = build_bipartite_factors(StepId::Step1);
    (void)f1b;
    CHECK(max_abs_diff(f1, (identity(4) - kImag * kron(pauli_x(), pauli_x())) / s2) < 1e-15);
    // step-3 factor diag(1-i, 1+i, 1+i, 1-i)/sqrt(2)
    auto [f3, f3b] = build_bipartite_factors(StepId::Step3);
    (void)f3b;
    CHECK(f3(0, 0) == cxd(1, -1) / s2);
    CHECK(f3(1, 1) == cxd(1, 1) / s2);
}

TEST_CASE("Bell-basis action of U1") {
    ComplexMatrix u1 = build_step_unitary(StepId::Step1);
    ComplexVector zero(2), one(2);
    zero << 1, 0;
    one << 0, 1;
    std::array<ComplexVector, 2> probe{zero, one};
    for (int j = 0; j < 2; ++j) {
        CHECK(max_abs_diff(u1 * kron(bell_state(2), probe[j]),
                           kron(bell_state(2), probe[j])) < 1e-12);
        CHECK(max_abs_diff(u1 * kron(bell_state(4), probe[j]),
                           kron(bell_state(4), probe[j])) < 1e-12);
        CHECK(max_abs_diff(u1 * kron(bell_state(1), probe[j]),
                           -kImag * kron(bell_state(3), probe[1 - j])) < 1e-12);
        CHECK(max_abs_diff(u1 * kron(bell_state(3), probe[j]),
                           -kImag * kron(bell_state(1), probe[1 - j])) < 1e-12);
    }
}

TEST_CASE("apply_step worked example") {
    BellCoefficients c(0.4, 0.3, 0.2, 0.1);
    ComplexMatrix rho = bds_density(c);

    ProtocolStepReport r1 = apply_step(rho, StepId::Step1);
    // The probe picks up |1> with probability c1 + c3.
    CHECK(std::abs(r1.probe_state(0, 0) - cxd(0.4, 0)) < 1e-14);
    CHECK(std::abs(r1.probe_state(1, 1) - cxd(0.6, 0)) < 1e-14);
    CHECK(r1.m_value == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r1.probe_basis == ProbeBasis::SigmaZ);

    ProtocolStepReport r2 = apply_step(rho, StepId::Step2);
    CHECK(r2.m_value == doctest::Approx(0.0).epsilon(1e-12));

    ProtocolStepReport r3 = apply_step(rho, StepId::Step3);
    // probe coherence is half the sigma-x expectation
    CHECK(std::abs(r3.probe_state(0, 1) - cxd(0.2, 0)) < 1e-14);
    CHECK(r3.m_value == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(r3.probe_basis == ProbeBasis::SigmaX);

    // Step-1 post state: Psi1 and Psi3 weights exchanged.
    CHECK(max_abs_diff(r1.post_bds,
                       bds_density(BellCoefficients(0.2, 0.3, 0.4, 0.1))) < 1e-14);

    CHECK_THROWS_AS(apply_step(identity(4), StepId::Step1), std::invalid_argument);
}

TEST_CASE("probe and post-step closed forms on random points") {
    SplitMix64 rng(32);
    for (int it = 0; it < 200; ++it) {
        BellCoefficients c = random_simplex(rng);
        ComplexMatrix rho = bds_density(c);
        for (StepId step : {StepId::Step1, StepId::Step2, StepId::Step3}) {
            ProtocolStepReport r = apply_step(rho, step);
            CHECK(max_abs_diff(r.probe_state, probe_closed_form(step, c)) < 1e-13);
            CHECK(std::abs(r.m_value - m_closed_form(step, c)) < 1e-13);
            CHECK(max_abs_diff(r.post_bds, bds_density(exchanged_coefficients(step, c))) <
                  1e-13);
        }
    }
}

TEST_CASE("recovery pass restores the state and repeats the measurement") {
    BellCoefficients c(0.4, 0.3, 0.2, 0.1);
    ComplexMatrix rho = bds_density(c);
    for (StepId step : {StepId::Step1, StepId::Step2, StepId::Step3}) {
        ProtocolStepReport first = apply_step(rho, step);
        auto [restored, second] = recovery_pass(first);
        CHECK(max_abs_diff(restored, rho) < 1e-12);
        CHECK(std::abs(second.m_value - first.m_value) < 1e-12);
        CHECK(max_abs_diff(second.probe_state, first.probe_state) < 1e-12);
    }

    // A pure Psi2 input is invariant at every stage of step 1.
    ComplexMatrix psi2 = bell_state(2) * bell_state(2).adjoint();
    ProtocolStepReport r = apply_step(psi2, StepId::Step1);
    CHECK(max_abs_diff(r.post_bds, psi2) < 1e-13);
    CHECK(max_abs_diff(recovery_pass(r).first, psi2) < 1e-13);
}

TEST_CASE("coefficient recovery") {
    CoefficientRecovery rec = recover_coefficients(1.0, 1.0, 1.0);
    CHECK(rec.coefficients[0] == 1.0);
    CHECK(rec.coefficients[1] == 0.0);
    CHECK_FALSE(rec.was_projected);

    rec = recover_coefficients(0.0, 0.0, 0.0);
    for (int i = 0; i < 4; ++i) CHECK(rec.coefficients[i] == 0.25);

    rec = recover_coefficients(0.2, 0.0, 0.4);
    CHECK(rec.coefficients[0] == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(rec.coefficients[1] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(rec.coefficients[2] == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(rec.coefficients[3] == doctest::Approx(0.1).epsilon(1e-14));

    CHECK_THROWS_AS(recover_coefficients(1.5, 0.0, 0.0), std::invalid_argument);

    // Inconsistent inputs leave the simplex and get projected.
    rec = recover_coefficients(1.0, -1.0, 1.0);
    CHECK(rec.was_projected);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        CHECK(rec.coefficients[i] >= 0.0);
        sum += rec.coefficients[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("simplex projection is idempotent and exact on interior points") {
    std::array<double, 4> v{0.4, 0.3, 0.2, 0.1};
    CHECK(project_to_simplex(v) == v);
    std::array<double, 4> w{0.7, 0.3, 0.0, 0.0};
    CHECK(project_to_simplex(w) == w);
    // projection of an outside point
    std::array<double, 4> p = project_to_simplex({0.9, 0.9, -0.4, -0.4});
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[2] == 0.0);
    CHECK(p[3] == 0.0);
}

TEST_CASE("forward-inverse round trip on random simplex points") {
    SplitMix64 rng(33);
    for (int it = 0; it < 500; ++it) {
        BellCoefficients c = random_simplex(rng);
        ComplexMatrix rho = bds_density(c);
        double m1 = apply_step(rho, StepId::Step1).m_value;
        double m2 = apply_step(rho, StepId::Step2).m_value;
        double m3 = apply_step(rho, StepId::Step3).m_value;
        CoefficientRecovery rec = recover_coefficients(m1, m2, m3);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(rec.coefficients[i] - c[i]) < 1e-12);
    }
}

TEST_CASE("ideal identification pipeline") {
    IdentificationResult r = run_ideal_identification(BellCoefficients(0.4, 0.3, 0.2, 0.1));
    CHECK(r.m[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.m[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.m[2] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(r.recovered[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(r.residual_trace_distance < 1e-10);

    IdentificationResult mixed =
        run_ideal_identification(BellCoefficients(0.25, 0.25, 0.25, 0.25));
    for (double m : mixed.m) CHECK(std::abs(m) < 1e-14);
    CHECK(mixed.residual_trace_distance < 1e-10);

    IdentificationResult psi2 = run_ideal_identification(BellCoefficients(0, 1, 0, 0));
    CHECK(psi2.m[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(psi2.m[1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(psi2.m[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(psi2.recovered[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nondestructiveness on random points") {
    SplitMix64 rng(34);
    for (int it = 0; it < 200; ++it) {
        IdentificationResult r = run_ideal_identification(random_simplex(rng));
        CHECK(r.residual_trace_distance < 1e-10);
    }
}

TEST_SUITE_END();
