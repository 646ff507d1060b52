#include "perfsum/indicator.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "perfsum/errors.hpp"

namespace perfsum {

IndicatorValue IndicatorValue::defined(double v) {
    if (std::isnan(v) || !(v >= -kProbabilityTolerance && v <= 1.0 + kProbabilityTolerance))
        throw std::invalid_argument("indicator value outside [0,1]: " + std::to_string(v));
    IndicatorValue out;
    out.v_ = std::clamp(v, 0.0, 1.0);
    return out;
}

double IndicatorValue::value() const {
    if (!v_) throw std::logic_error("value() called on an undefined indicator");
    return *v_;
}

IndicatorSpec IndicatorSpec::probabilistic(OutcomeSet event, OutcomeSet condition) {
    if (event.empty())
        throw InvalidSpecError("indicator event set must be non-empty");
    if (!event.proper_subset_of(condition))
        throw InvalidSpecError("indicator requires event " + event.to_string() +
                               " to be a proper subset of condition " + condition.to_string());
    IndicatorSpec spec;
    spec.tag_ = Tag::probabilistic;
    spec.event_bits_ = static_cast<std::uint8_t>(event.bits());
    spec.condition_bits_ = static_cast<std::uint8_t>(condition.bits());
    return spec;
}

IndicatorSpec IndicatorSpec::unconditional(OutcomeSet event) {
    return probabilistic(event, OutcomeSet::universe());
}

IndicatorSpec IndicatorSpec::derived(DerivedKind kind) noexcept {
    IndicatorSpec spec;
    spec.tag_ = Tag::derived;
    spec.kind_ = kind;
    return spec;
}

OutcomeSet IndicatorSpec::event() const {
    if (!is_probabilistic()) throw std::logic_error("event() on a derived indicator");
    return OutcomeSet::from_bits(event_bits_);
}

OutcomeSet IndicatorSpec::condition() const {
    if (!is_probabilistic()) throw std::logic_error("condition() on a derived indicator");
    return OutcomeSet::from_bits(condition_bits_);
}

IndicatorSpec::DerivedKind IndicatorSpec::derived_kind() const {
    if (!is_derived()) throw std::logic_error("derived_kind() on a probabilistic indicator");
    return kind_;
}

namespace indicators {

IndicatorSpec prior_pos() {
    return IndicatorSpec::unconditional({Outcome::fn, Outcome::tp});
}
IndicatorSpec prior_neg() {
    return IndicatorSpec::unconditional({Outcome::tn, Outcome::fp});
}
IndicatorSpec tau_pos() {
    return IndicatorSpec::unconditional({Outcome::fp, Outcome::tp});
}
IndicatorSpec tau_neg() {
    return IndicatorSpec::unconditional({Outcome::tn, Outcome::fn});
}
IndicatorSpec error_rate() {
    return IndicatorSpec::unconditional({Outcome::fp, Outcome::fn});
}
IndicatorSpec tnr() {
    return IndicatorSpec::probabilistic({Outcome::tn}, {Outcome::tn, Outcome::fp});
}
IndicatorSpec fpr() {
    return IndicatorSpec::probabilistic({Outcome::fp}, {Outcome::tn, Outcome::fp});
}
IndicatorSpec fnr() {
    return IndicatorSpec::probabilistic({Outcome::fn}, {Outcome::fn, Outcome::tp});
}
IndicatorSpec tpr() {
    return IndicatorSpec::probabilistic({Outcome::tp}, {Outcome::fn, Outcome::tp});
}
IndicatorSpec ppv() {
    return IndicatorSpec::probabilistic({Outcome::tp}, {Outcome::fp, Outcome::tp});
}
IndicatorSpec npv() {
    return IndicatorSpec::probabilistic({Outcome::tn}, {Outcome::tn, Outcome::fn});
}
IndicatorSpec f_score() {
    return IndicatorSpec::derived(IndicatorSpec::DerivedKind::f_score);
}
IndicatorSpec accuracy() {
    return IndicatorSpec::derived(IndicatorSpec::DerivedKind::accuracy);
}
IndicatorSpec balanced_accuracy() {
    return IndicatorSpec::derived(IndicatorSpec::DerivedKind::balanced_accuracy);
}
IndicatorSpec jaccard() {
    return IndicatorSpec::derived(IndicatorSpec::DerivedKind::jaccard);
}

std::span<const IndicatorSpec> named_probabilistic() {
    static const std::array<IndicatorSpec, 11> specs{
        prior_pos(), prior_neg(), tau_pos(), tau_neg(), error_rate(), tnr(), fpr(), fnr(),
        tpr(),       ppv(),       npv()};
    return specs;
}

std::span<const std::pair<std::string_view, IndicatorSpec>> names() {
    // Canonical name first per indicator; later entries are accepted aliases.
    static const std::vector<std::pair<std::string_view, IndicatorSpec>> table{
        {"prior_pos", prior_pos()},
        {"prior_neg", prior_neg()},
        {"tau_pos", tau_pos()},
        {"tau_neg", tau_neg()},
        {"ER", error_rate()},
        {"TNR", tnr()},
        {"FPR", fpr()},
        {"FNR", fnr()},
        {"TPR", tpr()},
        {"PPV", ppv()},
        {"NPV", npv()},
        {"F", f_score()},
        {"A", accuracy()},
        {"BA", balanced_accuracy()},
        {"J", jaccard()},
        // aliases
        {"error_rate", error_rate()},
        {"specificity", tnr()},
        {"recall", tpr()},
        {"R", tpr()},
        {"sensitivity", tpr()},
        {"precision", ppv()},
        {"P", ppv()},
        {"F1", f_score()},
        {"fscore", f_score()},
        {"f_score", f_score()},
        {"f-score", f_score()},
        {"accuracy", accuracy()},
        {"balanced_accuracy", balanced_accuracy()},
        {"jaccard", jaccard()},
        {"iou", jaccard()},
    };
    return table;
}

} // namespace indicators

IndicatorSpec IndicatorSpec::parse(std::string_view text) {
    auto strip = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.remove_suffix(1);
        return s;
    };
    std::string_view body = strip(text);
    if (body.empty()) throw InvalidSpecError("empty indicator name");

    if (body.front() == '{') {
        auto bar = body.find('|');
        if (bar == std::string_view::npos)
            return unconditional(OutcomeSet::parse(body));
        OutcomeSet event = OutcomeSet::parse(body.substr(0, bar));
        OutcomeSet condition = OutcomeSet::parse(body.substr(bar + 1));
        return probabilistic(event, condition);
    }

    auto lowered = [](std::string_view s) {
        std::string out;
        out.reserve(s.size());
        for (char c : s)
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        return out;
    };
    const std::string wanted = lowered(body);
    for (const auto& [name, spec] : indicators::names())
        if (lowered(name) == wanted) return spec;
    throw InvalidSpecError("unknown indicator '" + std::string(text) + "'");
}

std::string IndicatorSpec::name() const {
    for (const auto& [name, spec] : indicators::names())
        if (spec == *this) return std::string(name); // canonical entries come first
    std::string out = event().to_string();
    if (!condition().is_universe()) {
        out += '|';
        out += condition().to_string();
    }
    return out;
}

double unconditional_value(const NormalizedConfusion& nc, OutcomeSet event) noexcept {
    return nc.mass(event);
}

namespace {

IndicatorValue ratio_or_undefined(double numerator, double denominator) {
    if (denominator <= 0.0) return IndicatorValue::undefined();
    return IndicatorValue::defined(std::min(numerator / denominator, 1.0));
}

} // namespace

IndicatorValue indicator_value(const NormalizedConfusion& nc, const IndicatorSpec& spec) {
    if (spec.is_probabilistic())
        return ratio_or_undefined(nc.mass(spec.event() & spec.condition()),
                                  nc.mass(spec.condition()));

    switch (spec.derived_kind()) {
    case IndicatorSpec::DerivedKind::f_score:
        return ratio_or_undefined(2.0 * nc.tp(), nc.fp() + nc.fn() + 2.0 * nc.tp());
    case IndicatorSpec::DerivedKind::accuracy:
        return IndicatorValue::defined(nc.tn() + nc.tp());
    case IndicatorSpec::DerivedKind::balanced_accuracy: {
        IndicatorValue tnr = indicator_value(nc, indicators::tnr());
        IndicatorValue tpr = indicator_value(nc, indicators::tpr());
        if (!tnr.is_defined() || !tpr.is_defined()) return IndicatorValue::undefined();
        return IndicatorValue::defined((tnr.value() + tpr.value()) / 2.0);
    }
    case IndicatorSpec::DerivedKind::jaccard:
        return ratio_or_undefined(nc.tp(), nc.fp() + nc.fn() + nc.tp());
    }
    throw std::logic_error("unhandled derived indicator kind");
}

NormalizedConfusion confusion_from_roc(double prior_pos, IndicatorValue fpr, IndicatorValue tpr) {
    if (std::isnan(prior_pos) || prior_pos < 0.0 || prior_pos > 1.0)
        throw std::invalid_argument("prior_pos outside [0,1]: " + std::to_string(prior_pos));

    const double prior_neg = 1.0 - prior_pos;
    double p_tp = 0.0, p_fn = 0.0, p_fp = 0.0, p_tn = 0.0;
    if (prior_pos > 0.0) {
        if (!tpr.is_defined())
            throw MissingIndicatorError("tpr is undefined but the positive prior is " +
                                        std::to_string(prior_pos));
        p_tp = prior_pos * tpr.value();
        p_fn = prior_pos * (1.0 - tpr.value());
    }
    if (prior_pos < 1.0) {
        if (!fpr.is_defined())
            throw MissingIndicatorError("fpr is undefined but the negative prior is " +
                                        std::to_string(prior_neg));
        p_fp = prior_neg * fpr.value();
        p_tn = prior_neg * (1.0 - fpr.value());
    }
    return NormalizedConfusion(p_tn, p_fp, p_fn, p_tp);
}

} // namespace perfsum
