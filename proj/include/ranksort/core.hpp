#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ranksort {

/// A batch of classifier outputs with continuous quality labels.
///
/// Logits are raw scores s_i; labels y_i in [0,1] are localisation
/// qualities (e.g. IoU). An example is positive iff y_i > 0 and negative
/// iff y_i == 0 exactly; small positive labels are never rounded down.
/// Instances are immutable after construction and safe to share across
/// threads.
class RankingProblem {
public:
    RankingProblem(std::vector<double> logits, std::vector<double> labels);

    std::size_t size() const { return logits_.size(); }
    double logit(std::size_t i) const { return logits_[i]; }
    double label(std::size_t i) const { return labels_[i]; }
    std::span<const double> logits() const { return logits_; }
    std::span<const double> labels() const { return labels_; }

    bool is_positive(std::size_t i) const { return labels_[i] > 0.0; }
    std::size_t positive_count() const { return positive_count_; }

private:
    std::vector<double> logits_;
    std::vector<double> labels_;
    std::size_t positive_count_ = 0;
};

/// Piecewise-linear relaxation of the unit step on [-delta, delta]:
/// H(x) = 0 for x <= -delta, 1 for x >= delta, x/(2*delta) + 0.5 between.
class SmoothStep {
public:
    explicit SmoothStep(double delta);

    double operator()(double x) const {
        if (x <= -delta_) return 0.0;
        if (x >= delta_) return 1.0;
        return x / (2.0 * delta_) + 0.5;
    }

    double delta() const { return delta_; }

private:
    double delta_;
};

/// Smoothed pairwise ranking statistics for one example.
///
/// Self-inclusion convention: the pair (i,i) contributes exactly 1 to
/// rank(i) and to the count of i's own class (rank_plus when i is
/// positive, n_fp when i is negative), never the smoothed H(0) = 0.5.
/// Consequently rank == rank_plus + n_fp for every index.
struct PairStats {
    double rank = 0.0;       ///< 1 + sum over j != i of H(s_j - s_i)
    double rank_plus = 0.0;  ///< share of rank contributed by positives
    double n_fp = 0.0;       ///< share of rank contributed by negatives
};

/// Index partition induced by the labels; order-stable (ascending).
struct Partition {
    std::vector<std::size_t> positives;
    std::vector<std::size_t> negatives;
};

/// Thrown when a loss is requested for a problem with no positives
/// (the normalizer Z = |P| would be zero). Callers typically skip the batch.
class EmptyPositivesError : public std::runtime_error {
public:
    EmptyPositivesError();
};

/// Evaluates the smoothed step with argument checking; throws
/// std::invalid_argument on non-finite x or delta <= 0.
double smooth_step(double x, double delta);

Partition partition(const RankingProblem& problem);

PairStats pair_stats(const RankingProblem& problem, std::size_t i,
                     const SmoothStep& step);

}  // namespace ranksort
