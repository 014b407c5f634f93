#include "ranksort/framework.hpp"

namespace ranksort {

LossReport compute_loss(const RankingProblem& problem,
                        const PairwiseErrorModel& model,
                        const SmoothStep& step) {
    if (problem.positive_count() == 0) {
        throw EmptyPositivesError();
    }
    const std::size_t n = problem.size();
    const std::vector<double> terms = model.primary_terms(problem, step);

    // Fixed reduction order: each row summed ascending, rows reduced ascending.
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += terms[i * n + j];
        }
        total += row;
    }

    LossReport report;
    report.loss = total / static_cast<double>(problem.positive_count());
    report.per_positive = model.positive_errors(problem, step);
    return report;
}

std::vector<double> compute_gradients_generic(const RankingProblem& problem,
                                              const PairwiseErrorModel& model,
                                              const SmoothStep& step) {
    if (problem.positive_count() == 0) {
        throw EmptyPositivesError();
    }
    const std::size_t n = problem.size();
    const std::vector<double> terms = model.primary_terms(problem, step);
    const double z = static_cast<double>(problem.positive_count());

    std::vector<double> gradients(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double incoming = 0.0;
        double outgoing = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            incoming += terms[j * n + i];
            outgoing += terms[i * n + j];
        }
        gradients[i] = (incoming - outgoing) / z;
    }
    return gradients;
}

}  // namespace ranksort
