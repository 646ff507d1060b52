#pragma once

#include <optional>

namespace perfsum {

// Point in ROC space; both coordinates in [0,1].
struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;

    friend bool operator==(const RocPoint&, const RocPoint&) noexcept = default;
};

// Point in precision-recall space; both coordinates in [0,1].
struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;

    friend bool operator==(const PrPoint&, const PrPoint&) noexcept = default;
};

// Prior-dependent passage from ROC to PR. Returns nullopt when the point has
// no positive-prediction mass (the precision is undefined there).
// Throws InvalidPriorError unless prior_pos lies in (0,1], and
// std::invalid_argument for coordinates outside [0,1].
std::optional<PrPoint> roc_to_pr(RocPoint p, double prior_pos);

// Algebraic inverse of the passage. Requires prior_pos in (0,1) and
// precision > 0 (ZeroPrecisionError). Throws AchievabilityError when the
// implied false positive rate exceeds 1, i.e. the PR point lies below the
// achievable boundary for this prior.
RocPoint pr_to_roc(PrPoint p, double prior_pos);

// Lowest precision any classifier can reach at the given prior and recall
// (the image of the fpr = 1 line). Zero when recall is zero.
double min_achievable_precision(double prior_pos, double recall);

} // namespace perfsum
