#include "ranksort/synth.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "ranksort/baselines.hpp"
#include "ranksort/metrics.hpp"
#include "ranksort/rs_loss.hpp"

namespace ranksort::synth {
namespace {

constexpr double kPi = 3.14159265358979323846;

// mt19937_64 output is fully specified by the standard; the uniform and
// normal transforms below avoid std distributions so streams are identical
// on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

Box box_from_center(double cx, double cy, double w, double h) {
    return Box(cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0);
}

struct ClsEval {
    double loss = 0.0;
    std::vector<double> gradients;
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

ClsEval eval_score_based(const LossChoice& choice, const RankingProblem& problem) {
    const std::size_t n = problem.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    ClsEval out;
    out.gradients.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = problem.logit(i);
        const double t = problem.is_positive(i) ? 1.0 : 0.0;
        if (choice.kind == LossKind::cross_entropy) {
            // Stable binary cross-entropy on the logit.
            out.loss += (std::max(s, 0.0) - s * t + std::log1p(std::exp(-std::abs(s)))) * inv_n;
            out.gradients[i] = (sigmoid(s) - t) * inv_n;
        } else {
            const double a = choice.focal_alpha;
            const double g = choice.focal_gamma;
            double p = sigmoid(s);
            p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
            const double u = 1.0 - p;
            if (t > 0.5) {
                out.loss += -a * std::pow(u, g) * std::log(p) * inv_n;
                out.gradients[i] = a * std::pow(u, g) * (g * p * std::log(p) - u) * inv_n;
            } else {
                out.loss += -(1.0 - a) * std::pow(p, g) * std::log(u) * inv_n;
                out.gradients[i] =
                    (1.0 - a) * std::pow(p, g) * (p - g * u * std::log(u)) * inv_n;
            }
        }
    }
    return out;
}

ClsEval eval_classification(const LossChoice& choice, const RankingProblem& problem) {
    ClsEval out;
    switch (choice.kind) {
        case LossKind::rs:
        case LossKind::rs_ranking_only: {
            const SmoothStep step(choice.delta);
            const bool sorting = choice.kind == LossKind::rs;
            out.loss = rs_loss_value(problem, step, sorting);
            out.gradients = rs_gradients(problem, step, sorting);
            break;
        }
        case LossKind::ap: {
            LossReport report = ap_loss(problem, SmoothStep(choice.delta));
            out.loss = report.loss;
            out.gradients = std::move(report.gradients);
            break;
        }
        case LossKind::cross_entropy:
        case LossKind::focal:
            out = eval_score_based(choice, problem);
            break;
    }
    return out;
}

}  // namespace

std::vector<SynthBatch> generate_dataset(const SynthConfig& config) {
    if (config.n_features == 0 || config.n_positives == 0 || config.n_negatives == 0) {
        throw std::invalid_argument("generate_dataset: counts must be positive");
    }
    if (!(config.label_noise >= 0.0)) {
        throw std::invalid_argument("generate_dataset: label_noise must be >= 0");
    }
    Rng rng(config.seed);
    const double shift_jitter = std::min(config.label_noise, 0.6);
    const double scale_lo = std::max(0.5, 1.0 - config.label_noise);
    const double scale_hi = std::min(1.5, 1.0 + config.label_noise);
    const std::size_t d = config.n_features;

    std::vector<SynthBatch> batches;
    batches.reserve(config.batches_per_epoch);
    for (std::size_t b = 0; b < config.batches_per_epoch; ++b) {
        SynthBatch batch;
        batch.n_positives = config.n_positives;
        batch.n_examples = config.n_positives + config.n_negatives;
        batch.features.reserve(batch.n_examples * d);
        batch.labels.reserve(batch.n_examples);

        for (std::size_t p = 0; p < config.n_positives; ++p) {
            const double cx = rng.uniform(0.0, 10.0);
            const double cy = rng.uniform(0.0, 10.0);
            const double w = rng.uniform(1.0, 3.0);
            const double h = rng.uniform(1.0, 3.0);
            const Box gt = box_from_center(cx, cy, w, h);

            const double dx = rng.uniform(-shift_jitter, shift_jitter) * w;
            const double dy = rng.uniform(-shift_jitter, shift_jitter) * h;
            const double sw = rng.uniform(scale_lo, scale_hi);
            const double sh = rng.uniform(scale_lo, scale_hi);
            const Box anchor = box_from_center(cx + dx, cy + dy, w * sw, h * sh);

            const double y = iou(anchor, gt);
            batch.labels.push_back(y);
            batch.gt_boxes.push_back(gt);
            batch.anchor_boxes.push_back(anchor);

            for (std::size_t k = 0; k < d; ++k) {
                double mean = 0.0;
                if (k == 0) mean = config.class_separation;
                if (k == 1) mean = config.quality_signal * (2.0 * y - 1.0);
                batch.features.push_back(mean + rng.normal());
            }
        }
        for (std::size_t q = 0; q < config.n_negatives; ++q) {
            batch.labels.push_back(0.0);
            for (std::size_t k = 0; k < d; ++k) {
                batch.features.push_back(rng.normal());
            }
        }
        batches.push_back(std::move(batch));
    }
    return batches;
}

double Model::logit(const double* x, std::size_t n_features) const {
    double s = cls_bias;
    for (std::size_t k = 0; k < n_features; ++k) {
        s += cls_weights[k] * x[k];
    }
    return s;
}

std::array<double, 4> Model::offsets(const double* x, std::size_t n_features) const {
    std::array<double, 4> out = reg_bias;
    for (std::size_t c = 0; c < 4; ++c) {
        for (std::size_t k = 0; k < n_features; ++k) {
            out[c] += reg_weights[c * n_features + k] * x[k];
        }
    }
    return out;
}

LossChoice LossChoice::make(LossKind kind) {
    LossChoice choice;
    choice.kind = kind;
    choice.delta = kind == LossKind::ap ? kDefaultApDelta : kDefaultRsDelta;
    return choice;
}

LossKind loss_kind_from_name(const std::string& name) {
    if (name == "rs") return LossKind::rs;
    if (name == "rs-rank-only") return LossKind::rs_ranking_only;
    if (name == "ap") return LossKind::ap;
    if (name == "ce") return LossKind::cross_entropy;
    if (name == "focal") return LossKind::focal;
    throw std::invalid_argument("unknown loss name: " + name);
}

std::string loss_kind_name(LossKind kind) {
    switch (kind) {
        case LossKind::rs: return "rs";
        case LossKind::rs_ranking_only: return "rs-rank-only";
        case LossKind::ap: return "ap";
        case LossKind::cross_entropy: return "ce";
        case LossKind::focal: return "focal";
    }
    return "?";
}

TrainReport train(const SynthConfig& config, const LossChoice& loss,
                  const WeightingMode& weighting, const BalanceMode& balance) {
    const std::vector<SynthBatch> dataset = generate_dataset(config);
    const std::size_t d = config.n_features;
    const SmoothStep weight_step(loss.delta > 0.0 ? loss.delta : kDefaultRsDelta);

    TrainReport report;
    Model model(d);
    TaskBalancer balancer(balance);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double sum_cls_loss = 0.0, sum_box_loss = 0.0;
        double sum_cls_grad_l1 = 0.0, sum_box_grad_l1 = 0.0;
        double last_lambda = balancer.current();

        for (std::size_t b = 0; b < dataset.size(); ++b) {
            const SynthBatch& batch = dataset[b];
            const std::size_t n = batch.n_examples;
            const std::size_t np = batch.n_positives;

            std::vector<double> logits(n);
            for (std::size_t i = 0; i < n; ++i) {
                logits[i] = model.logit(&batch.features[i * d], d);
            }
            const RankingProblem problem(logits, batch.labels);
            const ClsEval cls = eval_classification(loss, problem);

            // Box branch: predictions are anchors plus regressed deltas.
            std::vector<Box> box_preds;
            std::vector<std::array<double, 4>> raw_offsets(np);
            box_preds.reserve(np);
            for (std::size_t p = 0; p < np; ++p) {
                raw_offsets[p] = model.offsets(&batch.features[p * d], d);
                const Box& a = batch.anchor_boxes[p];
                const double x1 = a.x1 + raw_offsets[p][0];
                const double y1 = a.y1 + raw_offsets[p][1];
                const double x2 = a.x2 + raw_offsets[p][2];
                const double y2 = a.y2 + raw_offsets[p][3];
                // A regressed box may momentarily invert; evaluate it as the
                // tightest valid box so GIoU stays defined.
                box_preds.push_back(Box(std::min(x1, x2), std::min(y1, y2),
                                        std::max(x1, x2), std::max(y1, y2)));
            }
            const std::vector<double> weights =
                instance_weights(weighting, problem, box_preds, batch.gt_boxes,
                                 weight_step);
            double weight_sum = 0.0;
            for (const double w : weights) weight_sum += w;

            double box_loss = 0.0;
            std::vector<std::array<double, 4>> box_grads(np, {0.0, 0.0, 0.0, 0.0});
            if (weight_sum > 0.0) {
                for (std::size_t p = 0; p < np; ++p) {
                    const GiouGrad g = giou_with_grad(box_preds[p], batch.gt_boxes[p]);
                    const double wn = weights[p] / weight_sum;
                    box_loss += wn * (1.0 - g.value);
                    for (std::size_t c = 0; c < 4; ++c) {
                        box_grads[p][c] = -wn * g.d_pred[c];
                    }
                }
            }

            if (!std::isfinite(cls.loss) || !std::isfinite(box_loss)) {
                report.diverged = true;
                report.divergence_note = "non-finite loss at epoch " +
                                         std::to_string(epoch) + ", iteration " +
                                         std::to_string(b);
                report.final_model = model;
                return report;
            }

            double cls_grad_l1 = 0.0;
            for (const double g : cls.gradients) cls_grad_l1 += std::abs(g);
            double box_grad_l1 = 0.0;
            for (const auto& g : box_grads) {
                for (const double v : g) box_grad_l1 += std::abs(v);
            }

            const TaskBalancer::Update bal =
                balancer.update(cls.loss, box_loss, cls_grad_l1, box_grad_l1);
            last_lambda = bal.lambda;

            IterationRecord rec;
            rec.epoch = epoch;
            rec.iteration = b;
            rec.cls_loss = cls.loss;
            rec.box_loss = box_loss;
            rec.lambda_box = bal.lambda;
            rec.balance_degenerate = bal.degenerate;
            report.iterations.push_back(rec);

            // SGD step. Classifier sees only classification gradients;
            // instance weights are constants with respect to the scores.
            const double lr = config.learning_rate;
            for (std::size_t i = 0; i < n; ++i) {
                const double g = cls.gradients[i];
                if (g == 0.0) continue;
                const double* x = &batch.features[i * d];
                for (std::size_t k = 0; k < d; ++k) {
                    model.cls_weights[k] -= lr * g * x[k];
                }
                model.cls_bias -= lr * g;
            }
            for (std::size_t p = 0; p < np; ++p) {
                const double* x = &batch.features[p * d];
                for (std::size_t c = 0; c < 4; ++c) {
                    const double g = lr * bal.lambda * box_grads[p][c];
                    if (g == 0.0) continue;
                    for (std::size_t k = 0; k < d; ++k) {
                        model.reg_weights[c * d + k] -= g * x[k];
                    }
                    model.reg_bias[c] -= g;
                }
            }

            sum_cls_loss += cls.loss;
            sum_box_loss += box_loss;
            sum_cls_grad_l1 += cls_grad_l1;
            sum_box_grad_l1 += box_grad_l1;
        }

        // Epoch evaluation over the full (regenerated) stream.
        std::vector<double> all_scores;
        std::vector<bool> all_flags;
        std::vector<double> pos_scores, pos_labels;
        for (const SynthBatch& batch : dataset) {
            for (std::size_t i = 0; i < batch.n_examples; ++i) {
                const double s = model.logit(&batch.features[i * d], d);
                all_scores.push_back(s);
                all_flags.push_back(batch.labels[i] > 0.0);
                if (batch.labels[i] > 0.0) {
                    pos_scores.push_back(s);
                    pos_labels.push_back(batch.labels[i]);
                }
            }
        }

        EpochRecord rec;
        rec.epoch = epoch;
        const double inv_batches = 1.0 / static_cast<double>(dataset.size());
        rec.mean_cls_loss = sum_cls_loss * inv_batches;
        rec.mean_box_loss = sum_box_loss * inv_batches;
        rec.lambda_box = last_lambda;
        rec.ap = average_precision(all_scores, all_flags);
        rec.spearman = pos_scores.size() >= 2
                           ? spearman_rho(pos_scores, pos_labels).value_or(0.0)
                           : 0.0;
        rec.cls_grad_l1 = sum_cls_grad_l1 * inv_batches;
        rec.box_grad_l1 = sum_box_grad_l1 * inv_batches;
        report.epochs.push_back(rec);
    }

    report.final_model = model;
    return report;
}

std::vector<SweepRow> imbalance_sweep(const SynthConfig& base,
                                      const std::vector<std::size_t>& ratios,
                                      const std::vector<LossChoice>& losses,
                                      const std::vector<std::uint64_t>& seeds,
                                      const WeightingMode& weighting,
                                      const BalanceMode& balance,
                                      std::size_t max_threads) {
    for (const std::size_t r : ratios) {
        if (r < 1) throw std::invalid_argument("imbalance_sweep: ratios must be >= 1");
    }

    struct Cell {
        std::size_t ratio;
        LossChoice loss;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const std::size_t r : ratios) {
        for (const LossChoice& l : losses) {
            for (const std::uint64_t s : seeds) {
                cells.push_back({r, l, s});
            }
        }
    }

    std::vector<SweepRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= cells.size()) break;
            const Cell& cell = cells[idx];
            SynthConfig cfg = base;
            cfg.n_negatives = cell.ratio * base.n_positives;
            cfg.seed = cell.seed;
            const TrainReport report = train(cfg, cell.loss, weighting, balance);

            SweepRow row;
            row.ratio = cell.ratio;
            row.loss = cell.loss.kind;
            row.seed = cell.seed;
            row.diverged = report.diverged;
            if (!report.epochs.empty()) {
                row.final_ap = report.epochs.back().ap;
                row.final_spearman = report.epochs.back().spearman;
            }
            rows[idx] = row;
        }
    };

    const std::size_t n_threads =
        std::max<std::size_t>(1, std::min(max_threads, cells.size()));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return rows;
}

}  // namespace ranksort::synth
