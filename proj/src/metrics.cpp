#include "ranksort/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ranksort {
namespace {

// Fractional ranks (1-based), ties receiving the average of their positions.
std::vector<double> fractional_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });

    std::vector<double> ranks(n);
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start;
        while (end + 1 < n && values[order[end + 1]] == values[order[start]]) {
            ++end;
        }
        const double avg = (static_cast<double>(start) + static_cast<double>(end)) / 2.0 + 1.0;
        for (std::size_t k = start; k <= end; ++k) {
            ranks[order[k]] = avg;
        }
        start = end + 1;
    }
    return ranks;
}

}  // namespace

double average_precision(const std::vector<double>& scores,
                         const std::vector<bool>& is_positive) {
    if (scores.size() != is_positive.size()) {
        throw std::invalid_argument("average_precision: length mismatch");
    }
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) {
            throw std::invalid_argument("average_precision: scores must be finite");
        }
        if (is_positive[i]) ++n_pos;
    }
    if (n_pos == 0) {
        throw std::invalid_argument("average_precision: no positive examples");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        if (is_positive[order[rank]]) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
        }
    }
    return sum / static_cast<double>(n_pos);
}

std::optional<double> spearman_rho(const std::vector<double>& scores,
                                   const std::vector<double>& labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("spearman_rho: length mismatch");
    }
    if (scores.size() < 2) {
        throw std::invalid_argument("spearman_rho: needs at least two pairs");
    }
    const std::vector<double> ra = fractional_ranks(scores);
    const std::vector<double> rb = fractional_ranks(labels);
    const double n = static_cast<double>(ra.size());

    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        mean_a += ra[i];
        mean_b += rb[i];
    }
    mean_a /= n;
    mean_b /= n;

    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - mean_a;
        const double db = rb[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) {
        return std::nullopt;
    }
    return cov / std::sqrt(var_a * var_b);
}

}  // namespace ranksort
