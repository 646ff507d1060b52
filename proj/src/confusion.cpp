#include "perfsum/confusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "perfsum/errors.hpp"

namespace perfsum {

namespace {

double checked_probability(double v, const char* what) {
    if (!(v >= -kProbabilityTolerance && v <= 1.0 + kProbabilityTolerance))
        throw std::invalid_argument(std::string(what) + " outside [0,1]: " + std::to_string(v));
    return std::clamp(v, 0.0, 1.0);
}

} // namespace

NormalizedConfusion::NormalizedConfusion(double tn, double fp, double fn, double tp) {
    const double sum = tn + fp + fn + tp;
    if (!(std::abs(sum - 1.0) <= kProbabilityTolerance))
        throw std::invalid_argument("confusion probabilities sum to " + std::to_string(sum) +
                                    ", expected 1");
    p_[0] = checked_probability(tn, "p_tn");
    p_[1] = checked_probability(fp, "p_fp");
    p_[2] = checked_probability(fn, "p_fn");
    p_[3] = checked_probability(tp, "p_tp");
}

double NormalizedConfusion::mass(OutcomeSet set) const noexcept {
    double sum = 0.0;
    for (Outcome o : kAllOutcomes)
        if (set.contains(o)) sum += p_[outcome_index(o)];
    return sum;
}

NormalizedConfusion normalize(const ConfusionCounts& counts) {
    const std::uint64_t total = counts.total();
    if (total == 0) throw ZeroTotalError("cannot normalize a confusion with zero total count");
    const double t = static_cast<double>(total);
    return NormalizedConfusion(static_cast<double>(counts.tn) / t,
                               static_cast<double>(counts.fp) / t,
                               static_cast<double>(counts.fn) / t,
                               static_cast<double>(counts.tp) / t);
}

} // namespace perfsum
