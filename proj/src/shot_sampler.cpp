#include "bdsid/shot_sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace bdsid {

namespace {

// Per-step stream: one sub-seed per step drawn from a master generator.
SplitMix64 stream_for(std::uint64_t seed, StepId step) {
    SplitMix64 master(seed);
    std::uint64_t sub = 0;
    for (int k = 0; k < static_cast<int>(step); ++k) sub = master.next();
    return SplitMix64(sub);
}

}  // namespace

double outcome_probability(StepId step, const BellCoefficients& c) {
    switch (step) {
        case StepId::Step1: return c[0] + c[2];
        case StepId::Step2: return c[0] + c[3];
        case StepId::Step3: return 0.5 * (1.0 + c[0] + c[1] - c[2] - c[3]);
    }
    throw std::invalid_argument("outcome_probability: bad step");
}

StepCounts sample_step(StepId step, const BellCoefficients& c, const ShotPlan& plan) {
    if (plan.shots_per_step < 1)
        throw std::invalid_argument("sample_step: shots_per_step must be >= 1");
    const double p = outcome_probability(step, c);
    SplitMix64 rng = stream_for(plan.seed, step);
    const std::uint64_t total = plan.shots_per_step * (plan.include_recovery_shots ? 2 : 1);
    std::uint64_t n_plus = 0;
    for (std::uint64_t s = 0; s < total; ++s)
        if (rng.uniform01() < p) ++n_plus;
    return {n_plus, total - n_plus};
}

EstimateReport estimate(const BellCoefficients& c_true, const ShotPlan& plan) {
    std::array<double, 3> m_hat{};
    std::array<std::uint64_t, 3> shots{};
    double var_sum = 0.0;
    int idx = 0;
    for (StepId step : {StepId::Step1, StepId::Step2, StepId::Step3}) {
        StepCounts counts = sample_step(step, c_true, plan);
        const double n = double(counts.n_plus + counts.n_minus);
        m_hat[idx] = (double(counts.n_plus) - double(counts.n_minus)) / n;
        shots[idx] = counts.n_plus + counts.n_minus;
        var_sum += (1.0 - m_hat[idx] * m_hat[idx]) / n;
        ++idx;
    }
    CoefficientRecovery rec = recover_coefficients(m_hat[0], m_hat[1], m_hat[2]);
    const double n_eff =
        double(plan.shots_per_step) * (plan.include_recovery_shots ? 2.0 : 1.0);
    const double se = std::max(std::sqrt(var_sum / 16.0), 1.0 / n_eff);
    return {m_hat, rec.coefficients, rec.was_projected, {se, se, se, se}, shots};
}

}  // namespace bdsid
