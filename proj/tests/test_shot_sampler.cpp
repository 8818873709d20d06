#include <doctest.h>

#include <cmath>

#include "bdsid/shot_sampler.hpp"
#include "test_support.hpp"

using namespace bdsid;
using namespace bdsid::testing;

TEST_SUITE_BEGIN("shot_sampler");

TEST_CASE("outcome probabilities") {
    BellCoefficients c(0.4, 0.3, 0.2, 0.1);
    CHECK(outcome_probability(StepId::Step1, c) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(outcome_probability(StepId::Step2, c) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(outcome_probability(StepId::Step3, c) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(outcome_probability(StepId::Step3, BellCoefficients(0.25, 0.25, 0.25, 0.25)) == 0.5);
    CHECK(outcome_probability(StepId::Step2, BellCoefficients(0, 0, 0, 1)) == 1.0);
}

TEST_CASE("deterministic outcomes at p = 0 and p = 1") {
    ShotPlan plan{1000, 7, false};
    StepCounts all = sample_step(StepId::Step2, BellCoefficients(0, 0, 0, 1), plan);
    CHECK(all.n_plus == 1000);
    CHECK(all.n_minus == 0);
    StepCounts none = sample_step(StepId::Step1, BellCoefficients(0, 1, 0, 0), plan);
    CHECK(none.n_plus == 0);
    CHECK(none.n_minus == 1000);
}

TEST_CASE("seeded binomial counts are reproducible") {
    BellCoefficients c(0.4, 0.3, 0.2, 0.1);  // step-1 probability 0.6
    ShotPlan plan{100000, 42, false};
    StepCounts counts = sample_step(StepId::Step1, c, plan);
    CHECK(counts.n_plus + counts.n_minus == 100000);
    // 3 sigma around 60000 is about +-465; the generator is pinned, so the
    // exact count is a regression value.
    CHECK(counts.n_plus > 59000);
    CHECK(counts.n_plus < 61000);
    CHECK(counts.n_plus == 59932);

    StepCounts again = sample_step(StepId::Step1, c, plan);
    CHECK(again.n_plus == counts.n_plus);
}

TEST_CASE("recovery shots double the data") {
    BellCoefficients c(0.4, 0.3, 0.2, 0.1);
    ShotPlan plan{5000, 3, true};
    StepCounts counts = sample_step(StepId::Step3, c, plan);
    CHECK(counts.n_plus + counts.n_minus == 10000);
    EstimateReport report = estimate(c, plan);
    for (auto used : report.shots_used) CHECK(used == 10000);
}

TEST_CASE("estimate is deterministic and accurate at N = 1e5") {
    BellCoefficients c(0.4, 0.3, 0.2, 0.1);
    ShotPlan plan{100000, 42, false};
    EstimateReport report = estimate(c, plan);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(report.c_hat[i] - c[i]) < 0.01);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(report.m_hat[i]) <= 1.0);

    EstimateReport again = estimate(c, plan);
    CHECK(again.m_hat == report.m_hat);
    CHECK(again.c_hat.c == report.c_hat.c);
    CHECK(again.std_err == report.std_err);
}

TEST_CASE("deterministic steps give exact estimates at any N") {
    BellCoefficients psi3(0, 0, 1, 0);
    ShotPlan plan{17, 99, false};
    EstimateReport report = estimate(psi3, plan);
    CHECK(report.m_hat[0] == 1.0);
    CHECK(report.m_hat[1] == -1.0);
    CHECK(report.m_hat[2] == -1.0);
    for (int i = 0; i < 4; ++i) CHECK(report.c_hat[i] == (i == 2 ? 1.0 : 0.0));
    // all outcomes deterministic: the variance floor kicks in
    CHECK(report.std_err[0] == doctest::Approx(1.0 / 17.0).epsilon(1e-14));
}

TEST_CASE("law of large numbers smoke at N = 1e8") {
    BellCoefficients c(0.4, 0.3, 0.2, 0.1);
    EstimateReport report = estimate(c, ShotPlan{100000000, 1234, false});
    for (int i = 0; i < 4; ++i) CHECK(std::abs(report.c_hat[i] - c[i]) < 5e-4);
}

TEST_CASE("unbiasedness over 200 seeds") {
    BellCoefficients c(0.35, 0.30, 0.20, 0.15);
    const std::uint64_t n = 10000;
    std::array<double, 3> mean{0, 0, 0};
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        EstimateReport r = estimate(c, ShotPlan{n, seed, false});
        for (int i = 0; i < 3; ++i) mean[i] += r.m_hat[i];
    }
    int idx = 0;
    for (StepId step : {StepId::Step1, StepId::Step2, StepId::Step3}) {
        double m = m_closed_form(step, c);
        double sigma = std::sqrt((1.0 - m * m) / double(n));
        CHECK(std::abs(mean[idx] / 200.0 - m) < 4.0 * sigma / std::sqrt(200.0));
        ++idx;
    }
}

TEST_CASE("coverage: 3 std_err contains the truth in >= 98% of runs") {
    BellCoefficients c(0.35, 0.30, 0.20, 0.15);
    int inside = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        EstimateReport r = estimate(c, ShotPlan{2000, seed, false});
        for (int i = 0; i < 4; ++i) {
            ++total;
            if (std::abs(r.c_hat[i] - c[i]) < 3.0 * r.std_err[i]) ++inside;
        }
    }
    CHECK(double(inside) / double(total) >= 0.98);
}

TEST_CASE("projection idempotence on in-simplex estimates") {
    BellCoefficients c(0.4, 0.3, 0.2, 0.1);
    EstimateReport r = estimate(c, ShotPlan{100000, 5, false});
    CoefficientRecovery again = recover_coefficients(r.m_hat[0], r.m_hat[1], r.m_hat[2]);
    if (!r.was_projected) CHECK(again.coefficients.c == r.c_hat.c);
}

TEST_SUITE_END();
