#pragma once

#include <utility>
#include <vector>

#include "ranksort/core.hpp"

// Brute-force references for the rank-and-sort loss. Deliberately slow,
// written as literal per-definition double loops with no shared
// subexpressions, and kept out of the library's public surface so that
// optimizations in the main implementation cannot leak in here.

namespace ranksort::oracle {

struct NaiveResult {
    double loss = 0.0;
    std::vector<double> gradients;
};

/// Direct transcription of the loss definition: per-positive ranking and
/// sorting errors, error-distribution pmfs, per-pair primary terms, and
/// gradients as (incoming - outgoing) primary-term sums. Every quantity is
/// recomputed in place with explicit loops.
NaiveResult naive_rs_reference(const RankingProblem& problem,
                               const SmoothStep& step);

/// Loss under the exact unit step H(x) = 1 for x >= 0, evaluated from an
/// explicit descending sort of the logits. Requires strictly distinct
/// logits; throws std::invalid_argument on an exact tie between two
/// different indices (the discrete rank would be ambiguous). Matches the
/// smoothed loss exactly whenever every pairwise gap exceeds delta.
double discrete_rank_reference(const RankingProblem& problem);

}  // namespace ranksort::oracle
