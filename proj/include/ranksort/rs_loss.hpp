#pragma once

#include <cstddef>
#include <vector>

#include "ranksort/core.hpp"
#include "ranksort/framework.hpp"

namespace ranksort {

/// The single smoothing hyper-parameter of the rank-and-sort loss.
inline constexpr double kDefaultRsDelta = 0.5;

/// Per-positive error breakdown of the rank-and-sort loss.
///
/// ranking[i] is the precision error n_fp/rank of the i-th positive (its
/// target is identically zero). sorting[i] averages the inverted labels
/// 1 - y_j of positives scored at or above it; sorting_target[i] restricts
/// that average to positives whose labels are at least its own, i.e. the
/// error remaining in the desired sorted order. The self pair counts as 1
/// in both numerator and denominator of the sorting terms.
struct RsErrorBreakdown {
    std::vector<std::size_t> positive_indices;  ///< ascending problem indices
    std::vector<double> ranking;
    std::vector<double> sorting;
    std::vector<double> sorting_target;
};

/// Error-distribution pmfs for one positive example.
struct RsPmfs {
    /// Over negatives in partition order: mass proportional to H(s_j - s_i),
    /// or all-zero when no negative scores above i.
    std::vector<double> ranking;
    /// Over positives in partition order: mass proportional to
    /// H(s_j - s_i) * [y_j < y_i]. Equal-labeled positives never receive
    /// demotion mass. All-zero when no lower-labeled positive scores above.
    std::vector<double> sorting;
};

/// Current and target errors per positive. When include_sorting is false
/// both sorting terms are reported as zero (ranking-only ablation, the
/// behaviour with conventional binary labels).
RsErrorBreakdown rs_errors(const RankingProblem& problem, const SmoothStep& step,
                           bool include_sorting = true);

/// Pmfs distributing positive i's errors; i is a problem index and must be
/// positive.
RsPmfs rs_pmfs(const RankingProblem& problem, const SmoothStep& step,
               std::size_t i);

/// The rank-and-sort loss as a pairwise error model: primary terms are
/// (ranking error) * p_R over positive-negative pairs and
/// (sorting error - sorting target) * p_S over positive-positive pairs.
class RsModel : public PairwiseErrorModel {
public:
    explicit RsModel(bool include_sorting = true)
        : include_sorting_(include_sorting) {}

    std::vector<double> primary_terms(const RankingProblem& problem,
                                      const SmoothStep& step) const override;
    std::vector<PositiveErrors> positive_errors(
        const RankingProblem& problem, const SmoothStep& step) const override;

private:
    bool include_sorting_;
};

/// Closed-form gradients; O(|P| * n) time, O(n) memory, no primary-term
/// matrix. Agrees with compute_gradients_generic(RsModel) to 1e-9.
/// Negatives receive nonnegative (demotion-only) gradients; positives
/// receive a promotion term plus demotion mass from better-labeled peers.
std::vector<double> rs_gradients(const RankingProblem& problem,
                                 const SmoothStep& step,
                                 bool include_sorting = true);

/// Loss value: mean over positives of (current - target) error.
/// Throws EmptyPositivesError when the problem has no positives.
double rs_loss_value(const RankingProblem& problem, const SmoothStep& step,
                     bool include_sorting = true);

}  // namespace ranksort
