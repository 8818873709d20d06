#pragma once

#include <array>
#include <cstdint>

#include "bdsid/bell_protocol.hpp"

namespace bdsid {

/// SplitMix64 (Steele/Lea/Flood 2014): a counter-based 64-bit generator with
/// a fixed, documented algorithm, so sampled counts are bit-identical across
/// platforms. uniform01() maps the top 53 bits onto [0,1).
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }
};

struct ShotPlan {
    std::uint64_t shots_per_step;
    std::uint64_t seed = 0;
    // When set, the recovery-pass probes are measured too; they follow the
    // same outcome distribution, so the data per step doubles.
    bool include_recovery_shots = false;
};

struct StepCounts {
    std::uint64_t n_plus;
    std::uint64_t n_minus;
};

struct EstimateReport {
    std::array<double, 3> m_hat;
    BellCoefficients c_hat;
    bool was_projected;
    std::array<double, 4> std_err;
    std::array<std::uint64_t, 3> shots_used;
};

/// Probability of the +1 outcome of the step's probe observable.
double outcome_probability(StepId step, const BellCoefficients& c);

/// Bernoulli counts for one step. The stream is derived from plan.seed so
/// that steps sample independently; identical inputs give identical counts.
StepCounts sample_step(StepId step, const BellCoefficients& c, const ShotPlan& plan);

/// Sample all three steps and invert the empirical means.
/// std_err comes from binomial variance propagation,
///   Var(c_hat) = (Var(M1) + Var(M2) + Var(M3)) / 16,  Var(M) = (1 - m_hat^2)/N,
/// bounded above by sqrt(3/(16 N)) and floored at 1/N per coefficient.
EstimateReport estimate(const BellCoefficients& c_true, const ShotPlan& plan);

}  // namespace bdsid
