#pragma once

#include <cstddef>
#include <vector>

#include "ranksort/core.hpp"

namespace ranksort {

/// Error decomposition reported for one positive example. The target
/// ranking error of every model built on this engine is zero by
/// construction, so only the sorting target is carried.
struct PositiveErrors {
    std::size_t index = 0;
    double current_ranking = 0.0;
    double current_sorting = 0.0;
    double target_sorting = 0.0;

    double current() const { return current_ranking + current_sorting; }
    double target() const { return target_sorting; }
};

/// Result of evaluating a ranking-based loss.
struct LossReport {
    double loss = 0.0;
    std::vector<PositiveErrors> per_positive;  ///< ascending index order
    std::vector<double> gradients;             ///< d loss / d logit, or empty
};

/// A pluggable per-pair error specification.
///
/// primary_terms() returns the full n-by-n matrix L (row-major; L[i*n+j]
/// is the error share positive i attributes to example j). Rows must be
/// consistent with the per-positive decomposition: for every positive i,
/// sum_j L_ij == current(i) - target(i), and L_ij == 0 wherever the model
/// defines no error for the pair.
class PairwiseErrorModel {
public:
    virtual ~PairwiseErrorModel() = default;

    virtual std::vector<double> primary_terms(const RankingProblem& problem,
                                              const SmoothStep& step) const = 0;

    virtual std::vector<PositiveErrors> positive_errors(
        const RankingProblem& problem, const SmoothStep& step) const = 0;
};

/// Loss value as the normalized sum of all primary terms, plus the
/// per-positive current/target decomposition. Gradients are not filled.
/// Throws EmptyPositivesError when the problem has no positives.
LossReport compute_loss(const RankingProblem& problem,
                        const PairwiseErrorModel& model,
                        const SmoothStep& step);

/// Error-driven gradients computed directly from the primary-term matrix:
/// d loss / d s_i = (1/Z) * (sum_j L_ji - sum_j L_ij). The step function
/// itself is never differentiated; the primary term doubles as the pair
/// update. This path is the reference implementation that model-specific
/// closed forms are checked against.
std::vector<double> compute_gradients_generic(const RankingProblem& problem,
                                              const PairwiseErrorModel& model,
                                              const SmoothStep& step);

}  // namespace ranksort
