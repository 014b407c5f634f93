#include "ranksort/rs_loss.hpp"

namespace ranksort {
namespace {

// Everything the loss needs about one positive, gathered in a single
// ascending scan so every caller sees identical summation order.
struct PositiveScan {
    std::size_t index = 0;
    double rank = 1.0;       // self counts 1
    double rank_plus = 1.0;  // self counts 1
    double n_fp = 0.0;       // also the ranking-pmf normalizer
    double sort_num = 0.0;   // sum H * (1 - y_j), self included
    double target_num = 0.0; // restricted to y_j >= y_i, self included
    double target_den = 1.0; // restricted count, self included
    double pmf_s_norm = 0.0; // sum over positives of H * [y_j < y_i]

    double ell_r() const { return n_fp / rank; }
    double ell_s() const { return sort_num / rank_plus; }
    double ell_s_target() const { return target_num / target_den; }
};

PositiveScan scan_positive(const RankingProblem& problem, const SmoothStep& step,
                           std::size_t i) {
    PositiveScan s;
    s.index = i;
    const double si = problem.logit(i);
    const double yi = problem.label(i);
    s.sort_num = 1.0 - yi;
    s.target_num = 1.0 - yi;
    for (std::size_t j = 0; j < problem.size(); ++j) {
        if (j == i) continue;
        const double h = step(problem.logit(j) - si);
        s.rank += h;
        const double yj = problem.label(j);
        if (yj > 0.0) {
            s.rank_plus += h;
            s.sort_num += h * (1.0 - yj);
            if (yj >= yi) {
                s.target_num += h * (1.0 - yj);
                s.target_den += h;
            } else {
                s.pmf_s_norm += h;
            }
        } else {
            s.n_fp += h;
        }
    }
    return s;
}

std::vector<PositiveScan> scan_all(const RankingProblem& problem,
                                   const SmoothStep& step) {
    std::vector<PositiveScan> scans;
    scans.reserve(problem.positive_count());
    for (std::size_t i = 0; i < problem.size(); ++i) {
        if (problem.is_positive(i)) {
            scans.push_back(scan_positive(problem, step, i));
        }
    }
    return scans;
}

}  // namespace

RsErrorBreakdown rs_errors(const RankingProblem& problem, const SmoothStep& step,
                           bool include_sorting) {
    if (problem.positive_count() == 0) {
        throw EmptyPositivesError();
    }
    RsErrorBreakdown out;
    for (const PositiveScan& s : scan_all(problem, step)) {
        out.positive_indices.push_back(s.index);
        out.ranking.push_back(s.ell_r());
        out.sorting.push_back(include_sorting ? s.ell_s() : 0.0);
        out.sorting_target.push_back(include_sorting ? s.ell_s_target() : 0.0);
    }
    return out;
}

RsPmfs rs_pmfs(const RankingProblem& problem, const SmoothStep& step,
               std::size_t i) {
    if (i >= problem.size() || !problem.is_positive(i)) {
        throw std::invalid_argument("rs_pmfs: index must refer to a positive example");
    }
    const PositiveScan s = scan_positive(problem, step, i);
    const double si = problem.logit(i);
    const double yi = problem.label(i);

    RsPmfs pmfs;
    for (std::size_t j = 0; j < problem.size(); ++j) {
        const double h = step(problem.logit(j) - si);
        if (problem.is_positive(j)) {
            const bool causes_error = j != i && problem.label(j) < yi;
            pmfs.sorting.push_back(
                causes_error && s.pmf_s_norm > 0.0 ? h / s.pmf_s_norm : 0.0);
        } else {
            pmfs.ranking.push_back(s.n_fp > 0.0 ? h / s.n_fp : 0.0);
        }
    }
    return pmfs;
}

std::vector<double> RsModel::primary_terms(const RankingProblem& problem,
                                           const SmoothStep& step) const {
    const std::size_t n = problem.size();
    std::vector<double> terms(n * n, 0.0);
    for (const PositiveScan& s : scan_all(problem, step)) {
        const std::size_t i = s.index;
        const double si = problem.logit(i);
        const double yi = problem.label(i);
        const double ranking_coef = s.n_fp > 0.0 ? s.ell_r() / s.n_fp : 0.0;
        const double sorting_coef =
            include_sorting_ && s.pmf_s_norm > 0.0
                ? (s.ell_s() - s.ell_s_target()) / s.pmf_s_norm
                : 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double h = step(problem.logit(j) - si);
            if (problem.is_positive(j)) {
                if (problem.label(j) < yi) {
                    terms[i * n + j] = sorting_coef * h;
                }
            } else {
                terms[i * n + j] = ranking_coef * h;
            }
        }
    }
    return terms;
}

std::vector<PositiveErrors> RsModel::positive_errors(
    const RankingProblem& problem, const SmoothStep& step) const {
    std::vector<PositiveErrors> out;
    for (const PositiveScan& s : scan_all(problem, step)) {
        PositiveErrors e;
        e.index = s.index;
        e.current_ranking = s.ell_r();
        e.current_sorting = include_sorting_ ? s.ell_s() : 0.0;
        e.target_sorting = include_sorting_ ? s.ell_s_target() : 0.0;
        out.push_back(e);
    }
    return out;
}

std::vector<double> rs_gradients(const RankingProblem& problem,
                                 const SmoothStep& step, bool include_sorting) {
    if (problem.positive_count() == 0) {
        throw EmptyPositivesError();
    }
    const std::size_t n = problem.size();
    const double z = static_cast<double>(problem.positive_count());
    const std::vector<PositiveScan> scans = scan_all(problem, step);

    std::vector<double> gradients(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double si = problem.logit(i);
        if (!problem.is_positive(i)) {
            // Demotion from every positive whose false positives include i.
            double g = 0.0;
            for (const PositiveScan& s : scans) {
                if (s.n_fp > 0.0) {
                    g += s.ell_r() / s.n_fp * step(si - problem.logit(s.index));
                }
            }
            gradients[i] = g / z;
            continue;
        }
        const double yi = problem.label(i);
        double promote = 0.0;
        double demote = 0.0;
        for (const PositiveScan& s : scans) {
            if (s.index == i) {
                const double current =
                    s.ell_r() + (include_sorting ? s.ell_s() : 0.0);
                const double target = include_sorting ? s.ell_s_target() : 0.0;
                promote = target - current;
            } else if (include_sorting && yi < problem.label(s.index) &&
                       s.pmf_s_norm > 0.0) {
                demote += (s.ell_s() - s.ell_s_target()) / s.pmf_s_norm *
                          step(si - problem.logit(s.index));
            }
        }
        gradients[i] = (promote + demote) / z;
    }
    return gradients;
}

double rs_loss_value(const RankingProblem& problem, const SmoothStep& step,
                     bool include_sorting) {
    if (problem.positive_count() == 0) {
        throw EmptyPositivesError();
    }
    double total = 0.0;
    for (const PositiveScan& s : scan_all(problem, step)) {
        if (include_sorting) {
            total += s.ell_r() + s.ell_s() - s.ell_s_target();
        } else {
            total += s.ell_r();
        }
    }
    return total / static_cast<double>(problem.positive_count());
}

}  // namespace ranksort
