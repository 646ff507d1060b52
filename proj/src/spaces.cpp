#include "perfsum/spaces.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "perfsum/errors.hpp"
#include "perfsum/format.hpp"

namespace perfsum {

namespace {

void require_unit(const char* what, double v) {
    if (std::isnan(v) || v < 0.0 || v > 1.0)
        throw std::invalid_argument(std::string(what) + " outside [0,1]: " + std::to_string(v));
}

} // namespace

std::optional<PrPoint> roc_to_pr(RocPoint p, double prior_pos) {
    require_unit("fpr", p.fpr);
    require_unit("tpr", p.tpr);
    if (std::isnan(prior_pos) || !(prior_pos > 0.0) || prior_pos > 1.0)
        throw InvalidPriorError("roc_to_pr needs a prior in (0,1], got " +
                                std::to_string(prior_pos));
    // Extended precision keeps the returned precision within half an ulp.
    // The inverse conversion divides by the negative prior, so any extra
    // rounding here would be amplified on the way back near prior_pos = 1.
    const long double positive_mass = static_cast<long double>(prior_pos) * p.tpr;
    const long double predicted_mass =
        (1.0L - prior_pos) * p.fpr + positive_mass;
    if (predicted_mass == 0.0L) return std::nullopt;
    return PrPoint{p.tpr, static_cast<double>(positive_mass / predicted_mass)};
}

RocPoint pr_to_roc(PrPoint p, double prior_pos) {
    require_unit("recall", p.recall);
    require_unit("precision", p.precision);
    if (std::isnan(prior_pos) || !(prior_pos > 0.0 && prior_pos < 1.0))
        throw InvalidPriorError("pr_to_roc needs a prior in (0,1), got " +
                                std::to_string(prior_pos));
    if (p.precision == 0.0)
        throw ZeroPrecisionError("pr_to_roc is undefined at zero precision");
    const long double precision = p.precision;
    const double fpr = static_cast<double>(static_cast<long double>(prior_pos) * p.recall *
                                           (1.0L - precision) /
                                           ((1.0L - prior_pos) * precision));
    if (fpr > 1.0)
        throw AchievabilityError(
            "PR point (recall " + format_real(p.recall) + ", precision " +
            format_real(p.precision) + ") is unachievable at prior " + format_real(prior_pos) +
            ": implied fpr " + format_real(fpr) + " exceeds 1 (minimum precision is " +
            format_real(min_achievable_precision(prior_pos, p.recall)) + ")");
    return RocPoint{fpr, p.recall};
}

double min_achievable_precision(double prior_pos, double recall) {
    require_unit("recall", recall);
    if (std::isnan(prior_pos) || !(prior_pos > 0.0 && prior_pos < 1.0))
        throw InvalidPriorError("min_achievable_precision needs a prior in (0,1), got " +
                                std::to_string(prior_pos));
    if (recall == 0.0) return 0.0;
    const double positive_mass = prior_pos * recall;
    return positive_mass / (positive_mass + (1.0 - prior_pos));
}

} // namespace perfsum
