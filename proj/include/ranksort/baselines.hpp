#pragma once

#include <span>
#include <vector>

#include "ranksort/core.hpp"
#include "ranksort/framework.hpp"

namespace ranksort {

/// Smoothing half-width validated for the average-precision loss.
inline constexpr double kDefaultApDelta = 1.0;

/// Average-precision loss as a pairwise error model: the error on a
/// positive is its precision error n_fp/rank with target zero, distributed
/// uniformly over the negatives scored above it. There is no
/// positive-to-positive error.
class ApModel : public PairwiseErrorModel {
public:
    std::vector<double> primary_terms(const RankingProblem& problem,
                                      const SmoothStep& step) const override;
    std::vector<PositiveErrors> positive_errors(
        const RankingProblem& problem, const SmoothStep& step) const override;
};

/// Loss, per-positive errors, and gradients of the AP loss, computed
/// through the generic engine. Throws EmptyPositivesError when the
/// problem has no positives.
LossReport ap_loss(const RankingProblem& problem,
                   const SmoothStep& step = SmoothStep(kDefaultApDelta));

/// Normalization for localisation-driven target errors: tau is the
/// assignment threshold dividing (1 - IoU), and must lie in [0, 1).
struct AlrpTargetConfig {
    double tau = 0.0;
};

/// Rank-dependent target errors of the aLRP baseline:
/// target(i) = (loc_error_i / (1 - tau)) / rank(i), clamped to [0, 1].
/// loc_errors aligns with the positives in ascending index order, one
/// value in [0, 1] each. Unlike a sorted-order target, this target moves
/// with the logits themselves.
std::vector<double> alrp_target_error(const RankingProblem& problem,
                                      std::span<const double> loc_errors,
                                      const AlrpTargetConfig& config,
                                      const SmoothStep& step);

}  // namespace ranksort
