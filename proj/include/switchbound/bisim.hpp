#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "switchbound/bound.hpp"
#include "switchbound/transition.hpp"

namespace switchbound {

enum class DelayPattern {
    /// Per switch: 0 or delta0 with probability 1/4 each, otherwise uniform on [0, delta0].
    /// Sample 0 uses all-zero delays and sample 1 all-delta0 delays.
    Randomized,
    AllZero,
    AllMax,
};

struct BisimulationOptions {
    double epsilon = 0.0;
    std::size_t samples = 200;
    std::size_t steps = 20;
    std::uint64_t seed = 42;
    double dt = 0.0;
    DelayPattern delays = DelayPattern::Randomized;
    /// Absolute tolerance for integration error in every comparison.
    double slack = 1e-9;
    /// Violations kept verbatim in the report (all are counted).
    std::size_t max_recorded = 32;
};

struct BisimulationViolation {
    std::size_t sample = 0;
    std::size_t step = 0;
    /// "premetric" or "relation".
    std::string quantity;
    /// "plain" (fixed precision) or "incrementing" (precision g^k(epsilon)).
    std::string condition;
    double value = 0.0;
    double bound = 0.0;
};

struct BisimulationReport {
    std::size_t samples = 0;
    std::size_t steps = 0;
    std::size_t plain_violations = 0;
    std::size_t incrementing_violations = 0;
    /// Largest premetric seen across all rounds.
    double max_premetric = 0.0;
    /// Largest premetric - g^k(epsilon) (negative when every round is inside the bound).
    double worst_incrementing_excess = -std::numeric_limits<double>::infinity();
    /// Largest premetric - epsilon.
    double worst_plain_excess = -std::numeric_limits<double>::infinity();
    std::vector<BisimulationViolation> recorded;

    [[nodiscard]] bool passed() const { return plain_violations == 0 && incrementing_violations == 0; }
};

/// Samples pairs in the relation {V' <= alpha_lo(epsilon)} and plays `steps` rounds of
/// matched transitions (delayed switch at k tau + d_k against the nominal switch at k tau).
/// Each round checks the premetric and the relation value against both epsilon and
/// g^k(epsilon). Initial nominal states are drawn from `region`; the next mode is chosen
/// at random among modes whose one-period nominal flow stays inside `region`.
[[nodiscard]] BisimulationReport check_bisimulation(const SwitchedSystem& sys, const LyapunovCertificate& cert,
                                                    const BoundParams& params, const Box& region,
                                                    const BisimulationOptions& options);

/// Deterministic 64-bit mixer used to derive per-sample seeds.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace switchbound
