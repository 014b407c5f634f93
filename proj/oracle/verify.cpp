#include "verify.hpp"

#include <algorithm>
#include <cmath>

#include "oracle.hpp"
#include "ranksort/baselines.hpp"
#include "ranksort/framework.hpp"
#include "ranksort/rs_loss.hpp"

namespace ranksort::oracle {
namespace {

double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform(rng);
}

struct Tracker {
    double max_deviation = 0.0;
    std::size_t cases = 0;

    void observe(double deviation) {
        max_deviation = std::max(max_deviation, deviation);
    }
    void observe(double actual, double expected) {
        observe(std::abs(actual - expected));
    }
    CheckResult finish(std::string name, double tolerance) const {
        return {std::move(name), cases, max_deviation, tolerance,
                max_deviation <= tolerance};
    }
};

// --------------------------------------------------------------------------
// Hand-derived fixtures
// --------------------------------------------------------------------------

void check_fixture(Tracker& t, const RankingProblem& problem, double delta,
                   double expected_loss,
                   const std::vector<double>& expected_gradients) {
    const SmoothStep step(delta);
    ++t.cases;
    t.observe(rs_loss_value(problem, step), expected_loss);
    const std::vector<double> grads = rs_gradients(problem, step);
    for (std::size_t i = 0; i < grads.size(); ++i) {
        t.observe(grads[i], expected_gradients[i]);
    }
    const NaiveResult naive = naive_rs_reference(problem, step);
    t.observe(naive.loss, expected_loss);
    for (std::size_t i = 0; i < grads.size(); ++i) {
        t.observe(naive.gradients[i], expected_gradients[i]);
    }
}

CheckResult fixtures_check() {
    Tracker t;

    // Two well-separated perfect positives over one negative: zero loss.
    check_fixture(t, RankingProblem({4.0, 3.0, 0.0}, {1.0, 1.0, 0.0}), 0.5,
                  0.0, {0.0, 0.0, 0.0});

    // One positive tied with one negative: precision error 0.5/1.5.
    check_fixture(t, RankingProblem({2.0, 2.0}, {0.8, 0.0}), 0.5, 1.0 / 3.0,
                  {-1.0 / 3.0, 1.0 / 3.0});

    // Two positives sorted against their labels; no negatives.
    check_fixture(t, RankingProblem({1.0, 2.0}, {0.9, 0.5}), 0.5, 0.1,
                  {-0.1, 0.1});

    // Five examples mixing a misplaced negative with a mis-sorted positive:
    //   idx0 s=9 y=0.9   perfectly placed        -> term 0
    //   idx1 s=7 y=0.3   above a better label    -> demotion 0.15/3
    //   idx2 s=5 y=0     false positive over idx3
    //   idx3 s=3 y=0.6   rank error 1/4, sorting 0.4 vs target 0.25
    //   idx4 s=1 y=0     harmless
    // loss = (0 + 0 + (1/4 + 0.15)) / 3
    check_fixture(t, RankingProblem({9.0, 7.0, 5.0, 3.0, 1.0},
                                    {0.9, 0.3, 0.0, 0.6, 0.0}),
                  0.5, 0.4 / 3.0,
                  {0.0, 0.05, 1.0 / 12.0, -0.4 / 3.0, 0.0});

    // Average-precision fixtures through the generic engine.
    const auto check_ap = [&t](const RankingProblem& problem, double delta,
                               double expected_loss,
                               const std::vector<double>& expected_gradients) {
        ++t.cases;
        const LossReport report = ap_loss(problem, SmoothStep(delta));
        t.observe(report.loss, expected_loss);
        for (std::size_t i = 0; i < report.gradients.size(); ++i) {
            t.observe(report.gradients[i], expected_gradients[i]);
        }
    };
    check_ap(RankingProblem({3.0, 0.0}, {1.0, 0.0}), 1.0, 0.0, {0.0, 0.0});
    check_ap(RankingProblem({0.0, 3.0}, {1.0, 0.0}), 1.0, 0.5, {-0.5, 0.5});
    check_ap(RankingProblem({2.0, 2.0}, {1.0, 0.0}), 0.5, 1.0 / 3.0,
             {-1.0 / 3.0, 1.0 / 3.0});

    return t.finish("fixture agreement", 1e-12);
}

// --------------------------------------------------------------------------
// Randomized corpora
// --------------------------------------------------------------------------

CheckResult closed_vs_generic_check(const VerifyOptions& options) {
    std::mt19937_64 rng(options.seed);
    Tracker t;
    const RsModel model;
    for (std::size_t c = 0; c < options.equivalence_problems; ++c) {
        const RankingProblem problem = random_problem(rng, 128);
        const SmoothStep step(uniform(rng, 0.2, 1.2));
        const std::vector<double> closed = rs_gradients(problem, step);
        const std::vector<double> generic =
            compute_gradients_generic(problem, model, step);
        ++t.cases;
        for (std::size_t i = 0; i < closed.size(); ++i) {
            t.observe(closed[i], generic[i]);
        }
    }
    return t.finish("closed-form vs generic gradients", 1e-9);
}

CheckResult oracle_equivalence_check(const VerifyOptions& options) {
    std::mt19937_64 rng(options.seed);  // same corpus as the gradient check
    Tracker t;
    for (std::size_t c = 0; c < options.equivalence_problems; ++c) {
        const RankingProblem problem = random_problem(rng, 128);
        const SmoothStep step(uniform(rng, 0.2, 1.2));
        const NaiveResult naive = naive_rs_reference(problem, step);
        ++t.cases;
        t.observe(rs_loss_value(problem, step), naive.loss);
        const std::vector<double> closed = rs_gradients(problem, step);
        for (std::size_t i = 0; i < closed.size(); ++i) {
            t.observe(closed[i], naive.gradients[i]);
        }
    }
    return t.finish("optimized vs naive reference", 1e-12);
}

void invariant_checks(const VerifyOptions& options,
                      std::vector<CheckResult>& results) {
    std::mt19937_64 rng(options.seed + 1);
    Tracker grad_sum, nonneg_loss, nonneg_neg_grads, shift, rs_vs_ap;
    for (std::size_t c = 0; c < options.invariant_problems; ++c) {
        const RankingProblem problem = random_problem(rng, 64);
        const SmoothStep step(uniform(rng, 0.2, 1.2));
        const double loss = rs_loss_value(problem, step);
        const std::vector<double> grads = rs_gradients(problem, step);

        ++grad_sum.cases;
        double sum = 0.0;
        for (const double g : grads) sum += g;
        grad_sum.observe(std::abs(sum));

        ++nonneg_loss.cases;
        nonneg_loss.observe(std::max(0.0, -loss));

        ++nonneg_neg_grads.cases;
        for (std::size_t i = 0; i < problem.size(); ++i) {
            if (!problem.is_positive(i)) {
                nonneg_neg_grads.observe(std::max(0.0, -grads[i]));
            }
        }

        // Uniform logit shift must not move the loss or the gradients.
        const double shift_c = uniform(rng, -10.0, 10.0);
        std::vector<double> shifted(problem.logits().begin(),
                                    problem.logits().end());
        for (double& s : shifted) s += shift_c;
        const RankingProblem moved(std::move(shifted),
                                   {problem.labels().begin(), problem.labels().end()});
        ++shift.cases;
        shift.observe(rs_loss_value(moved, step), loss);
        const std::vector<double> moved_grads = rs_gradients(moved, step);
        for (std::size_t i = 0; i < grads.size(); ++i) {
            shift.observe(moved_grads[i], grads[i]);
        }

        // With every label at 1 the sorting terms vanish and the loss
        // coincides with the average-precision loss.
        const RankingProblem unit = random_problem(rng, 64, true);
        ++rs_vs_ap.cases;
        rs_vs_ap.observe(rs_loss_value(unit, step),
                         compute_loss(unit, ApModel(), step).loss);
    }
    results.push_back(grad_sum.finish("gradient sum is zero", 1e-9));
    results.push_back(nonneg_loss.finish("loss is nonnegative", 0.0));
    results.push_back(
        nonneg_neg_grads.finish("negative-example gradients are >= 0", 0.0));
    results.push_back(shift.finish("loss and gradients are shift invariant", 1e-12));
    results.push_back(rs_vs_ap.finish("equals AP loss under unit labels", 1e-12));
}

CheckResult unit_step_consistency_check(const VerifyOptions& options) {
    std::mt19937_64 rng(options.seed + 2);
    Tracker t;
    const std::size_t cases = std::max<std::size_t>(100, options.invariant_problems / 20);
    for (std::size_t c = 0; c < cases; ++c) {
        const double delta = uniform(rng, 0.25, 1.0);
        const std::size_t n = 1 + rng() % 40;

        // Distinct logits with every pairwise gap strictly above delta,
        // dealt out in shuffled order.
        std::vector<double> logits(n);
        double value = uniform(rng, -3.0, 3.0);
        for (std::size_t i = 0; i < n; ++i) {
            logits[i] = value;
            value += delta * uniform(rng, 1.05, 2.0);
        }
        for (std::size_t i = n; i > 1; --i) {
            std::swap(logits[i - 1], logits[rng() % i]);
        }
        std::vector<double> labels(n, 0.0);
        const std::size_t forced_positive = rng() % n;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == forced_positive || uniform(rng) < 0.5) {
                labels[i] = uniform(rng, 0.05, 1.0);
            }
        }
        const RankingProblem problem(std::move(logits), std::move(labels));
        ++t.cases;
        t.observe(rs_loss_value(problem, SmoothStep(delta)),
                  discrete_rank_reference(problem));
    }
    return t.finish("matches discrete evaluation beyond the smoothing band", 0.0);
}

}  // namespace

RankingProblem random_problem(std::mt19937_64& rng, std::size_t max_n,
                              bool unit_labels) {
    const std::size_t n = 1 + rng() % max_n;
    const int scale_mode = static_cast<int>(rng() % 3);
    std::vector<double> logits(n);
    for (double& s : logits) {
        switch (scale_mode) {
            case 0: s = uniform(rng, -3.0, 3.0); break;
            case 1: s = uniform(rng, -0.4, 0.4); break;  // inside the band
            default: s = uniform(rng, -20.0, 20.0); break;
        }
    }
    if (n >= 2 && rng() % 4 == 0) {
        logits[rng() % n] = logits[rng() % n];  // occasional exact tie
    }

    const int label_mode = static_cast<int>(rng() % 3);
    std::vector<double> labels(n, 0.0);
    const std::size_t forced_positive = rng() % n;
    for (std::size_t i = 0; i < n; ++i) {
        const bool positive = i == forced_positive || uniform(rng) < 0.6;
        if (!positive) continue;
        if (unit_labels || label_mode == 2) {
            labels[i] = 1.0;
        } else if (label_mode == 1) {
            labels[i] = 0.1 * static_cast<double>(1 + rng() % 10);  // coarse grid
        } else {
            labels[i] = uniform(rng, 1e-3, 1.0);
        }
    }
    return RankingProblem(std::move(logits), std::move(labels));
}

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
    std::vector<CheckResult> results;
    results.push_back(fixtures_check());
    results.push_back(closed_vs_generic_check(options));
    results.push_back(oracle_equivalence_check(options));
    invariant_checks(options, results);
    results.push_back(unit_step_consistency_check(options));
    return results;
}

}  // namespace ranksort::oracle
