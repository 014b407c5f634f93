#include "ranksort/core.hpp"

#include <cmath>
#include <string>

namespace ranksort {

RankingProblem::RankingProblem(std::vector<double> logits,
                               std::vector<double> labels)
    : logits_(std::move(logits)), labels_(std::move(labels)) {
    if (logits_.empty()) {
        throw std::invalid_argument("ranking problem must contain at least one example");
    }
    if (logits_.size() != labels_.size()) {
        throw std::invalid_argument("logits and labels must have equal length");
    }
    for (std::size_t i = 0; i < logits_.size(); ++i) {
        if (!std::isfinite(logits_[i])) {
            throw std::invalid_argument("logit " + std::to_string(i) + " is not finite");
        }
        if (!(labels_[i] >= 0.0 && labels_[i] <= 1.0)) {
            throw std::invalid_argument("label " + std::to_string(i) +
                                        " outside [0, 1]");
        }
        if (labels_[i] > 0.0) ++positive_count_;
    }
}

SmoothStep::SmoothStep(double delta) : delta_(delta) {
    if (!std::isfinite(delta) || delta <= 0.0) {
        throw std::invalid_argument("smoothing half-width must be finite and positive");
    }
}

EmptyPositivesError::EmptyPositivesError()
    : std::runtime_error("loss undefined: no positive examples in problem") {}

double smooth_step(double x, double delta) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("smooth_step: x must be finite");
    }
    return SmoothStep(delta)(x);
}

Partition partition(const RankingProblem& problem) {
    Partition out;
    out.positives.reserve(problem.positive_count());
    out.negatives.reserve(problem.size() - problem.positive_count());
    for (std::size_t i = 0; i < problem.size(); ++i) {
        if (problem.is_positive(i)) {
            out.positives.push_back(i);
        } else {
            out.negatives.push_back(i);
        }
    }
    return out;
}

PairStats pair_stats(const RankingProblem& problem, std::size_t i,
                     const SmoothStep& step) {
    if (i >= problem.size()) {
        throw std::invalid_argument("pair_stats: index out of range");
    }
    PairStats stats;
    stats.rank = 1.0;
    if (problem.is_positive(i)) {
        stats.rank_plus = 1.0;
    } else {
        stats.n_fp = 1.0;
    }
    const double si = problem.logit(i);
    for (std::size_t j = 0; j < problem.size(); ++j) {
        if (j == i) continue;
        const double h = step(problem.logit(j) - si);
        stats.rank += h;
        if (problem.is_positive(j)) {
            stats.rank_plus += h;
        } else {
            stats.n_fp += h;
        }
    }
    return stats;
}

}  // namespace ranksort
