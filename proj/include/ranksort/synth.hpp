#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ranksort/core.hpp"
#include "ranksort/localisation.hpp"

namespace ranksort::synth {

/// Deterministic synthetic experiment definition. Identical configs
/// regenerate identical datasets and training runs, bit for bit.
///
/// Features: feature 0 carries the class signal (positives centered at
/// +class_separation, negatives at the origin); feature 1 carries the
/// localisation-quality signal for positives (centered at
/// quality_signal * (2*y - 1)); remaining features are unit noise.
///
/// Each positive owns a ground-truth box and an anchor jittered by up to
/// label_noise in position and scale; its label is the anchor/truth IoU,
/// which stays in (0, 1]. label_noise = 0 makes every anchor equal its
/// truth box, so every label is exactly 1.
struct SynthConfig {
    std::size_t n_features = 8;
    std::size_t n_positives = 4;   ///< per batch
    std::size_t n_negatives = 40;  ///< per batch
    std::size_t batches_per_epoch = 10;
    std::size_t epochs = 30;
    double label_noise = 0.3;
    double class_separation = 2.5;
    double quality_signal = 2.0;
    double learning_rate = 0.05;
    std::uint64_t seed = 1;
};

/// One batch: positives occupy indices [0, n_positives), negatives follow.
struct SynthBatch {
    std::size_t n_examples = 0;
    std::size_t n_positives = 0;
    std::vector<double> features;  ///< row-major, n_examples x n_features
    std::vector<double> labels;    ///< length n_examples
    std::vector<Box> anchor_boxes; ///< one per positive
    std::vector<Box> gt_boxes;     ///< one per positive
};

std::vector<SynthBatch> generate_dataset(const SynthConfig& config);

/// Linear scorer and box regressor. The classifier maps features to one
/// logit; the regressor maps features to four corner deltas added to the
/// anchor box.
struct Model {
    std::vector<double> cls_weights;  ///< n_features
    double cls_bias = 0.0;
    std::vector<double> reg_weights;  ///< 4 x n_features, row-major
    std::array<double, 4> reg_bias{};

    explicit Model(std::size_t n_features)
        : cls_weights(n_features, 0.0), reg_weights(4 * n_features, 0.0) {}

    double logit(const double* x, std::size_t n_features) const;
    std::array<double, 4> offsets(const double* x, std::size_t n_features) const;
};

enum class LossKind { rs, rs_ranking_only, ap, cross_entropy, focal };

struct LossChoice {
    LossKind kind = LossKind::rs;
    double delta = 0.5;  ///< smoothing half-width for rs/ap
    double focal_alpha = 0.25;
    double focal_gamma = 2.0;

    static LossChoice make(LossKind kind);
};

LossKind loss_kind_from_name(const std::string& name);
std::string loss_kind_name(LossKind kind);

struct IterationRecord {
    std::size_t epoch = 0;
    std::size_t iteration = 0;  ///< batch index within the epoch
    double cls_loss = 0.0;
    double box_loss = 0.0;
    double lambda_box = 1.0;
    bool balance_degenerate = false;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double mean_cls_loss = 0.0;
    double mean_box_loss = 0.0;
    double lambda_box = 1.0;  ///< after the epoch's last iteration
    double ap = 0.0;
    double spearman = 0.0;  ///< 0 when undefined (constant scores or labels)
    double cls_grad_l1 = 0.0;
    double box_grad_l1 = 0.0;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    std::vector<IterationRecord> iterations;
    Model final_model{0};
    bool diverged = false;
    std::string divergence_note;
};

/// Plain SGD over the synthetic stream. The classifier is updated through
/// the chain rule from the chosen loss's logit gradients; the regressor
/// through GIoU subgradients scaled by the balancing coefficient. Score-
/// based losses (cross_entropy, focal) consume binarized labels. Aborts
/// with a diagnostic record when the loss becomes non-finite.
TrainReport train(const SynthConfig& config, const LossChoice& loss,
                  const WeightingMode& weighting, const BalanceMode& balance);

struct SweepRow {
    std::size_t ratio = 1;  ///< negatives per positive
    LossKind loss = LossKind::rs;
    std::uint64_t seed = 0;
    double final_ap = 0.0;
    double final_spearman = 0.0;
    bool diverged = false;
};

/// Trains one cell per (ratio, loss, seed) with identical budgets; the
/// base config supplies everything except n_negatives (= ratio *
/// n_positives) and the seed. Cells may run on up to max_threads workers;
/// rows come back in declared cell order regardless of the schedule.
std::vector<SweepRow> imbalance_sweep(const SynthConfig& base,
                                      const std::vector<std::size_t>& ratios,
                                      const std::vector<LossChoice>& losses,
                                      const std::vector<std::uint64_t>& seeds,
                                      const WeightingMode& weighting,
                                      const BalanceMode& balance,
                                      std::size_t max_threads = 1);

}  // namespace ranksort::synth
