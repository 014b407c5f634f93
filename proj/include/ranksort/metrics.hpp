#pragma once

#include <optional>
#include <vector>

namespace ranksort {

/// Average precision of a ranked list: mean over positives of the precision
/// at that positive's rank after sorting scores descending. Score ties are
/// broken by ascending index so results are reproducible. Throws
/// std::invalid_argument when there is no positive or a score is not finite.
double average_precision(const std::vector<double>& scores,
                         const std::vector<bool>& is_positive);

/// Spearman's rank correlation with average ranks for ties. Requires at
/// least two pairs; returns nullopt when either variable is constant
/// (correlation undefined).
std::optional<double> spearman_rho(const std::vector<double>& scores,
                                   const std::vector<double>& labels);

}  // namespace ranksort
