#include "oracle.hpp"

#include <algorithm>
#include <numeric>

namespace ranksort::oracle {
namespace {

// Each helper recomputes its quantity from scratch; nothing is cached or
// shared, so a bug in one place cannot hide an equal bug elsewhere.

double unit_rank(const RankingProblem& p, const SmoothStep& h, std::size_t i) {
    double rank = 1.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (j == i) continue;
        rank += h(p.logit(j) - p.logit(i));
    }
    return rank;
}

double false_positives_above(const RankingProblem& p, const SmoothStep& h,
                             std::size_t i) {
    double n_fp = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (j == i || p.label(j) > 0.0) continue;
        n_fp += h(p.logit(j) - p.logit(i));
    }
    return n_fp;
}

double rank_among_positives(const RankingProblem& p, const SmoothStep& h,
                            std::size_t i) {
    double rank = 1.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (j == i || !(p.label(j) > 0.0)) continue;
        rank += h(p.logit(j) - p.logit(i));
    }
    return rank;
}

double ranking_error(const RankingProblem& p, const SmoothStep& h, std::size_t i) {
    return false_positives_above(p, h, i) / unit_rank(p, h, i);
}

double sorting_error(const RankingProblem& p, const SmoothStep& h, std::size_t i) {
    double num = 1.0 - p.label(i);  // self pair
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (j == i || !(p.label(j) > 0.0)) continue;
        num += h(p.logit(j) - p.logit(i)) * (1.0 - p.label(j));
    }
    return num / rank_among_positives(p, h, i);
}

double sorting_target(const RankingProblem& p, const SmoothStep& h, std::size_t i) {
    double num = 1.0 - p.label(i);  // self pair, y_i >= y_i
    double den = 1.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (j == i || !(p.label(j) > 0.0)) continue;
        if (p.label(j) >= p.label(i)) {
            num += h(p.logit(j) - p.logit(i)) * (1.0 - p.label(j));
            den += h(p.logit(j) - p.logit(i));
        }
    }
    return num / den;
}

double ranking_pmf(const RankingProblem& p, const SmoothStep& h, std::size_t j,
                   std::size_t i) {
    double norm = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k == i || p.label(k) > 0.0) continue;
        norm += h(p.logit(k) - p.logit(i));
    }
    if (norm == 0.0) return 0.0;
    return h(p.logit(j) - p.logit(i)) / norm;
}

double sorting_pmf(const RankingProblem& p, const SmoothStep& h, std::size_t j,
                   std::size_t i) {
    double norm = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k == i || !(p.label(k) > 0.0)) continue;
        if (p.label(k) < p.label(i)) {
            norm += h(p.logit(k) - p.logit(i));
        }
    }
    if (norm == 0.0) return 0.0;
    if (!(p.label(j) < p.label(i))) return 0.0;
    return h(p.logit(j) - p.logit(i)) / norm;
}

}  // namespace

NaiveResult naive_rs_reference(const RankingProblem& problem,
                               const SmoothStep& step) {
    if (problem.positive_count() == 0) {
        throw EmptyPositivesError();
    }
    const std::size_t n = problem.size();
    const double z = static_cast<double>(problem.positive_count());

    NaiveResult result;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(problem.label(i) > 0.0)) continue;
        result.loss += ranking_error(problem, step, i) +
                       sorting_error(problem, step, i) -
                       sorting_target(problem, step, i);
    }
    result.loss /= z;

    std::vector<std::vector<double>> terms(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        if (!(problem.label(i) > 0.0)) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (problem.label(j) > 0.0) {
                terms[i][j] = (sorting_error(problem, step, i) -
                               sorting_target(problem, step, i)) *
                              sorting_pmf(problem, step, j, i);
            } else {
                terms[i][j] = (ranking_error(problem, step, i) - 0.0) *
                              ranking_pmf(problem, step, j, i);
            }
        }
    }
    result.gradients.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double incoming = 0.0;
        double outgoing = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            incoming += terms[j][i];
            outgoing += terms[i][j];
        }
        result.gradients[i] = (incoming - outgoing) / z;
    }
    return result;
}

double discrete_rank_reference(const RankingProblem& problem) {
    if (problem.positive_count() == 0) {
        throw EmptyPositivesError();
    }
    const std::size_t n = problem.size();

    // Explicit descending sort; adjacent equal logits mean the discrete
    // rank is ambiguous.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return problem.logit(a) > problem.logit(b);
    });
    std::vector<double> rank_of(n, 0.0);
    for (std::size_t pos = 0; pos < n; ++pos) {
        if (pos + 1 < n &&
            problem.logit(order[pos]) == problem.logit(order[pos + 1])) {
            throw std::invalid_argument(
                "discrete_rank_reference: exact logit tie between distinct examples");
        }
        rank_of[order[pos]] = static_cast<double>(pos + 1);
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = problem.label(i);
        if (!(yi > 0.0)) continue;
        const double si = problem.logit(i);

        double n_fp = 0.0;
        double rank_plus = 1.0;
        double sort_num = 1.0 - yi;
        double target_num = 1.0 - yi;
        double target_den = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !(problem.logit(j) > si)) continue;
            const double yj = problem.label(j);
            if (yj > 0.0) {
                rank_plus += 1.0;
                sort_num += 1.0 - yj;
                if (yj >= yi) {
                    target_num += 1.0 - yj;
                    target_den += 1.0;
                }
            } else {
                n_fp += 1.0;
            }
        }
        total += n_fp / rank_of[i] + sort_num / rank_plus - target_num / target_den;
    }
    return total / static_cast<double>(problem.positive_count());
}

}  // namespace ranksort::oracle
