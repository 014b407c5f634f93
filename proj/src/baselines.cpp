#include "ranksort/baselines.hpp"

#include <algorithm>

namespace ranksort {

std::vector<double> ApModel::primary_terms(const RankingProblem& problem,
                                           const SmoothStep& step) const {
    const std::size_t n = problem.size();
    std::vector<double> terms(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!problem.is_positive(i)) continue;
        const PairStats stats = pair_stats(problem, i, step);
        if (stats.n_fp <= 0.0) continue;
        const double precision_error = stats.n_fp / stats.rank;
        const double coef = precision_error / stats.n_fp;
        const double si = problem.logit(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (!problem.is_positive(j)) {
                terms[i * n + j] = coef * step(problem.logit(j) - si);
            }
        }
    }
    return terms;
}

std::vector<PositiveErrors> ApModel::positive_errors(
    const RankingProblem& problem, const SmoothStep& step) const {
    std::vector<PositiveErrors> out;
    for (std::size_t i = 0; i < problem.size(); ++i) {
        if (!problem.is_positive(i)) continue;
        const PairStats stats = pair_stats(problem, i, step);
        PositiveErrors e;
        e.index = i;
        e.current_ranking = stats.n_fp / stats.rank;
        out.push_back(e);
    }
    return out;
}

LossReport ap_loss(const RankingProblem& problem, const SmoothStep& step) {
    const ApModel model;
    LossReport report = compute_loss(problem, model, step);
    report.gradients = compute_gradients_generic(problem, model, step);
    return report;
}

std::vector<double> alrp_target_error(const RankingProblem& problem,
                                      std::span<const double> loc_errors,
                                      const AlrpTargetConfig& config,
                                      const SmoothStep& step) {
    if (!(config.tau >= 0.0 && config.tau < 1.0)) {
        throw std::invalid_argument("alrp_target_error: tau must lie in [0, 1)");
    }
    if (loc_errors.size() != problem.positive_count()) {
        throw std::invalid_argument(
            "alrp_target_error: one localisation error per positive required");
    }
    std::vector<double> targets;
    targets.reserve(loc_errors.size());
    std::size_t p = 0;
    for (std::size_t i = 0; i < problem.size(); ++i) {
        if (!problem.is_positive(i)) continue;
        const double e = loc_errors[p++];
        if (!(e >= 0.0 && e <= 1.0)) {
            throw std::invalid_argument(
                "alrp_target_error: localisation errors must lie in [0, 1]");
        }
        const double rank = pair_stats(problem, i, step).rank;
        targets.push_back(std::clamp(e / (1.0 - config.tau) / rank, 0.0, 1.0));
    }
    return targets;
}

}  // namespace ranksort
