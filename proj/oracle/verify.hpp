#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ranksort/core.hpp"

// Verification suite shared by the command-line gradcheck and the
// acceptance tests: hand-derived fixtures, closed-form/generic gradient
// agreement, brute-force oracle equivalence, the loss invariants, and
// unit-step consistency.

namespace ranksort::oracle {

struct CheckResult {
    std::string name;
    std::size_t cases = 0;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyOptions {
    std::uint64_t seed = 927441;
    std::size_t equivalence_problems = 1000;  ///< n <= 128 corpus
    std::size_t invariant_problems = 10000;   ///< n <= 64 corpus
};

/// Random problems mixing label schemes (continuous, coarse grid, all-unit)
/// and logit scales (wide, inside the smoothing band, exact ties). Always
/// contains at least one positive.
RankingProblem random_problem(std::mt19937_64& rng, std::size_t max_n,
                              bool unit_labels = false);

std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace ranksort::oracle
