#pragma once

#include <array>
#include <span>
#include <vector>

#include "ranksort/core.hpp"

namespace ranksort {

/// Axis-aligned rectangle with corner order x1 <= x2, y1 <= y2.
/// Zero-area boxes are valid inputs to overlap measures but are never
/// accepted as ground truth.
struct Box {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    Box() = default;
    Box(double x1_, double y1_, double x2_, double y2_);

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const { return width() * height(); }
    bool degenerate() const { return width() == 0.0 || height() == 0.0; }
};

enum class GiouStatus { ok, degenerate_pair };

/// Plain intersection-over-union; 0 when the union is empty.
double iou(const Box& a, const Box& b);

/// Generalized IoU: IoU minus the fraction of the smallest enclosing box
/// not covered by the union. Ranges over [-1, 1]; equals IoU when one box
/// contains the other. When both boxes are degenerate the value is defined
/// as 0 and *status (if given) is set to degenerate_pair.
double giou(const Box& a, const Box& b, GiouStatus* status = nullptr);

/// GIoU of a predicted box against a fixed ground truth, together with the
/// subgradient with respect to the prediction corners (x1, y1, x2, y2).
/// At kinks (tied corners, touching boundaries) one one-sided derivative
/// is chosen.
struct GiouGrad {
    double value = 0.0;
    std::array<double, 4> d_pred{};
};

GiouGrad giou_with_grad(const Box& pred, const Box& gt);

/// Instance-level importance weighting for the box regression loss.
struct WeightingMode {
    enum class Kind { none, score_based, iou_based, ranking_based };

    Kind kind = Kind::none;
    double delta_loc = 1.0;  ///< smoothing half-width, ranking_based only

    static WeightingMode none() { return {Kind::none, 1.0}; }
    static WeightingMode score_based() { return {Kind::score_based, 1.0}; }
    static WeightingMode iou_based() { return {Kind::iou_based, 1.0}; }
    static WeightingMode ranking_based(double delta_loc);
};

/// Nonnegative weight per positive (ascending index order):
///   none          -> 1
///   score_based   -> sigmoid of the positive's logit
///   iou_based     -> IoU(pred, gt)
///   ranking_based -> (1/|P|) sum over positives k of H_loc(s_i - s_k)/rank(k),
///                    with the numerator smoothed by delta_loc and rank(k)
///                    by the supplied step.
/// Box spans must align with the positives for the modes that use them.
std::vector<double> instance_weights(const WeightingMode& mode,
                                     const RankingProblem& problem,
                                     std::span<const Box> boxes_pred,
                                     std::span<const Box> boxes_gt,
                                     const SmoothStep& step);

/// Weighted mean of per-instance GIoU losses (1 - giou). Weights must be
/// nonnegative with positive sum; ground-truth boxes must be non-degenerate.
double weighted_box_loss(std::span<const Box> boxes_pred,
                         std::span<const Box> boxes_gt,
                         std::span<const double> weights);

/// Task-level balancing coefficient policy for the combined loss
/// cls_loss + lambda * box_loss.
struct BalanceMode {
    enum class Kind { constant, value_based, magnitude_based };

    Kind kind = Kind::value_based;
    double lambda = 1.0;  ///< constant mode only

    static BalanceMode constant(double lambda);
    static BalanceMode value_based() { return {Kind::value_based, 1.0}; }
    static BalanceMode magnitude_based() { return {Kind::magnitude_based, 1.0}; }
};

/// Recomputes lambda every iteration and treats it as a constant during
/// backprop. value_based uses cls_loss/box_loss, magnitude_based the ratio
/// of gradient L1 norms. A zero denominator keeps the previous lambda
/// (initially 1.0) and flags the iteration as degenerate.
class TaskBalancer {
public:
    explicit TaskBalancer(const BalanceMode& mode) : mode_(mode) {}

    struct Update {
        double lambda = 1.0;
        bool degenerate = false;
    };

    Update update(double cls_loss, double box_loss, double cls_grad_l1,
                  double box_grad_l1);

    double current() const { return lambda_; }

private:
    BalanceMode mode_;
    double lambda_ = 1.0;
};

}  // namespace ranksort
