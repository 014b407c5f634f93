#include "ranksort/localisation.hpp"

#include <cmath>

namespace ranksort {
namespace {

struct Overlap {
    double inter = 0.0;
    double uni = 0.0;
    double enclosing = 0.0;
};

Overlap overlap(const Box& a, const Box& b) {
    Overlap o;
    const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    o.inter = iw > 0.0 && ih > 0.0 ? iw * ih : 0.0;
    o.uni = a.area() + b.area() - o.inter;
    o.enclosing = (std::max(a.x2, b.x2) - std::min(a.x1, b.x1)) *
                  (std::max(a.y2, b.y2) - std::min(a.y1, b.y1));
    return o;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Box::Box(double x1_, double y1_, double x2_, double y2_)
    : x1(x1_), y1(y1_), x2(x2_), y2(y2_) {
    if (!(std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
          std::isfinite(y2))) {
        throw std::invalid_argument("box corners must be finite");
    }
    if (x1 > x2 || y1 > y2) {
        throw std::invalid_argument("box corners must satisfy x1 <= x2, y1 <= y2");
    }
}

double iou(const Box& a, const Box& b) {
    const Overlap o = overlap(a, b);
    return o.uni > 0.0 ? o.inter / o.uni : 0.0;
}

double giou(const Box& a, const Box& b, GiouStatus* status) {
    if (status) *status = GiouStatus::ok;
    if (a.degenerate() && b.degenerate()) {
        if (status) *status = GiouStatus::degenerate_pair;
        return 0.0;
    }
    const Overlap o = overlap(a, b);
    return o.inter / o.uni - (o.enclosing - o.uni) / o.enclosing;
}

GiouGrad giou_with_grad(const Box& pred, const Box& gt) {
    if (gt.degenerate()) {
        throw std::invalid_argument("giou_with_grad: ground truth box is degenerate");
    }
    GiouGrad out;
    const Overlap o = overlap(pred, gt);

    const double iw = std::min(pred.x2, gt.x2) - std::max(pred.x1, gt.x1);
    const double ih = std::min(pred.y2, gt.y2) - std::max(pred.y1, gt.y1);
    const bool overlapping = iw > 0.0 && ih > 0.0;

    // d(intersection) / d(pred corner): active only when the prediction's
    // corner is the binding side of the overlap.
    std::array<double, 4> d_inter{};
    if (overlapping) {
        d_inter[0] = pred.x1 >= gt.x1 ? -ih : 0.0;
        d_inter[1] = pred.y1 >= gt.y1 ? -iw : 0.0;
        d_inter[2] = pred.x2 <= gt.x2 ? ih : 0.0;
        d_inter[3] = pred.y2 <= gt.y2 ? iw : 0.0;
    }

    const double pw = pred.width();
    const double ph = pred.height();
    const std::array<double, 4> d_area = {-ph, -pw, ph, pw};

    const double cw = std::max(pred.x2, gt.x2) - std::min(pred.x1, gt.x1);
    const double ch = std::max(pred.y2, gt.y2) - std::min(pred.y1, gt.y1);
    std::array<double, 4> d_enclosing{};
    d_enclosing[0] = pred.x1 <= gt.x1 ? -ch : 0.0;
    d_enclosing[1] = pred.y1 <= gt.y1 ? -cw : 0.0;
    d_enclosing[2] = pred.x2 >= gt.x2 ? ch : 0.0;
    d_enclosing[3] = pred.y2 >= gt.y2 ? cw : 0.0;

    // giou = inter/union + union/enclosing - 1, with d(union) = d(area) - d(inter).
    out.value = o.inter / o.uni + o.uni / o.enclosing - 1.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double d_uni = d_area[k] - d_inter[k];
        out.d_pred[k] = (d_inter[k] * o.uni - o.inter * d_uni) / (o.uni * o.uni) +
                        (d_uni * o.enclosing - o.uni * d_enclosing[k]) /
                            (o.enclosing * o.enclosing);
    }
    return out;
}

WeightingMode WeightingMode::ranking_based(double delta_loc) {
    if (!(delta_loc > 0.0) || !std::isfinite(delta_loc)) {
        throw std::invalid_argument("ranking_based weighting requires delta_loc > 0");
    }
    return {Kind::ranking_based, delta_loc};
}

std::vector<double> instance_weights(const WeightingMode& mode,
                                     const RankingProblem& problem,
                                     std::span<const Box> boxes_pred,
                                     std::span<const Box> boxes_gt,
                                     const SmoothStep& step) {
    const Partition part = partition(problem);
    const std::size_t p = part.positives.size();
    const bool needs_boxes = mode.kind == WeightingMode::Kind::iou_based;
    if (needs_boxes && (boxes_pred.size() != p || boxes_gt.size() != p)) {
        throw std::invalid_argument(
            "instance_weights: box spans must align with the positives");
    }

    std::vector<double> weights(p, 1.0);
    switch (mode.kind) {
        case WeightingMode::Kind::none:
            break;
        case WeightingMode::Kind::score_based:
            for (std::size_t k = 0; k < p; ++k) {
                weights[k] = sigmoid(problem.logit(part.positives[k]));
            }
            break;
        case WeightingMode::Kind::iou_based:
            for (std::size_t k = 0; k < p; ++k) {
                weights[k] = iou(boxes_pred[k], boxes_gt[k]);
            }
            break;
        case WeightingMode::Kind::ranking_based: {
            const SmoothStep loc_step(mode.delta_loc);
            std::vector<double> inv_rank(p);
            for (std::size_t k = 0; k < p; ++k) {
                inv_rank[k] = 1.0 / pair_stats(problem, part.positives[k], step).rank;
            }
            for (std::size_t k = 0; k < p; ++k) {
                const double si = problem.logit(part.positives[k]);
                double w = 0.0;
                for (std::size_t m = 0; m < p; ++m) {
                    w += loc_step(si - problem.logit(part.positives[m])) * inv_rank[m];
                }
                weights[k] = w / static_cast<double>(p);
            }
            break;
        }
    }
    return weights;
}

double weighted_box_loss(std::span<const Box> boxes_pred,
                         std::span<const Box> boxes_gt,
                         std::span<const double> weights) {
    if (boxes_pred.size() != boxes_gt.size() || boxes_pred.size() != weights.size()) {
        throw std::invalid_argument("weighted_box_loss: span lengths must match");
    }
    double weight_sum = 0.0;
    for (const double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("weighted_box_loss: weights must be nonnegative");
        }
        weight_sum += w;
    }
    if (weight_sum <= 0.0) {
        throw std::invalid_argument("weighted_box_loss: weights sum to zero");
    }
    double loss = 0.0;
    for (std::size_t k = 0; k < boxes_pred.size(); ++k) {
        if (boxes_gt[k].degenerate()) {
            throw std::invalid_argument(
                "weighted_box_loss: ground truth boxes must be non-degenerate");
        }
        loss += weights[k] / weight_sum * (1.0 - giou(boxes_pred[k], boxes_gt[k]));
    }
    return loss;
}

BalanceMode BalanceMode::constant(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("constant balancing requires lambda > 0");
    }
    return {Kind::constant, lambda};
}

TaskBalancer::Update TaskBalancer::update(double cls_loss, double box_loss,
                                          double cls_grad_l1,
                                          double box_grad_l1) {
    switch (mode_.kind) {
        case BalanceMode::Kind::constant:
            lambda_ = mode_.lambda;
            return {lambda_, false};
        case BalanceMode::Kind::value_based:
            if (box_loss > 0.0) {
                lambda_ = cls_loss / box_loss;
                return {lambda_, false};
            }
            return {lambda_, true};
        case BalanceMode::Kind::magnitude_based:
            if (box_grad_l1 > 0.0) {
                lambda_ = cls_grad_l1 / box_grad_l1;
                return {lambda_, false};
            }
            return {lambda_, true};
    }
    return {lambda_, true};  // unreachable
}

}  // namespace ranksort
