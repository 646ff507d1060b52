#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "perfsum/confusion.hpp"
#include "perfsum/outcome.hpp"

namespace perfsum {

// A probability in [0,1], or Undefined when the conditioning event has no
// mass. Undefined is a value, not an error: the summarizer consumes per-video
// undefined entries and resolves them at the aggregate level.
class IndicatorValue {
public:
    // Accepts values within kProbabilityTolerance of [0,1] and clamps them;
    // throws std::invalid_argument beyond that.
    static IndicatorValue defined(double v);
    static IndicatorValue undefined() noexcept { return IndicatorValue{}; }

    bool is_defined() const noexcept { return v_.has_value(); }
    // Throws std::logic_error when undefined.
    double value() const;
    double value_or(double fallback) const noexcept { return v_.value_or(fallback); }

    friend bool operator==(const IndicatorValue&, const IndicatorValue&) noexcept = default;

private:
    std::optional<double> v_;
};

// Names one member of the indicator family: either the conditional
// probability of the comparison outcome landing in `event` given that it
// lands in `condition`, or one of the classical derived scores.
class IndicatorSpec {
public:
    enum class DerivedKind : std::uint8_t {
        f_score = 0,
        accuracy = 1,
        balanced_accuracy = 2,
        jaccard = 3,
    };

    // Requires the family constraint: empty ⊊ event ⊊ condition ⊆ universe.
    // Throws InvalidSpecError otherwise.
    static IndicatorSpec probabilistic(OutcomeSet event, OutcomeSet condition);
    // Shorthand for probabilistic(event, universe).
    static IndicatorSpec unconditional(OutcomeSet event);
    static IndicatorSpec derived(DerivedKind kind) noexcept;

    // Accepts a known indicator name ("TPR", "recall", "F", ...) or a set
    // expression such as "{tp}|{fn,tp}" or "{fn,tp}". Case-insensitive for
    // names. Throws InvalidSpecError on failure.
    static IndicatorSpec parse(std::string_view text);

    bool is_probabilistic() const noexcept { return tag_ == Tag::probabilistic; }
    bool is_derived() const noexcept { return tag_ == Tag::derived; }

    // Probabilistic accessors; throw std::logic_error on a derived spec.
    OutcomeSet event() const;
    OutcomeSet condition() const;
    // Throws std::logic_error on a probabilistic spec.
    DerivedKind derived_kind() const;

    // Canonical display name ("TPR", "prior_pos", "F", ...); falls back to
    // the set expression for unnamed members of the family.
    std::string name() const;

    friend bool operator==(const IndicatorSpec&, const IndicatorSpec&) noexcept = default;
    friend std::strong_ordering operator<=>(const IndicatorSpec&,
                                            const IndicatorSpec&) noexcept = default;

private:
    enum class Tag : std::uint8_t { probabilistic = 0, derived = 1 };

    IndicatorSpec() = default;

    Tag tag_ = Tag::probabilistic;
    std::uint8_t event_bits_ = 0;
    std::uint8_t condition_bits_ = 0;
    DerivedKind kind_ = DerivedKind::f_score;
};

namespace indicators {

IndicatorSpec prior_pos();
IndicatorSpec prior_neg();
IndicatorSpec tau_pos();
IndicatorSpec tau_neg();
IndicatorSpec error_rate();
IndicatorSpec tnr();
IndicatorSpec fpr();
IndicatorSpec fnr();
IndicatorSpec tpr();
IndicatorSpec ppv();
IndicatorSpec npv();
IndicatorSpec f_score();
IndicatorSpec accuracy();
IndicatorSpec balanced_accuracy();
IndicatorSpec jaccard();

// The eleven named members of the conditional-probability family, in a fixed
// order (prior_pos, prior_neg, tau_pos, tau_neg, ER, TNR, FPR, FNR, TPR,
// PPV, NPV).
std::span<const IndicatorSpec> named_probabilistic();

// Every recognized (name, spec) pair, canonical names first.
std::span<const std::pair<std::string_view, IndicatorSpec>> names();

} // namespace indicators

// Probability that the comparison outcome lands in `event` (no conditioning).
// event = empty gives 0, event = universe gives 1.
double unconditional_value(const NormalizedConfusion& nc, OutcomeSet event) noexcept;

// Evaluates any family member or derived score on one normalized confusion.
IndicatorValue indicator_value(const NormalizedConfusion& nc, const IndicatorSpec& spec);

// Rebuilds the normalized confusion of one source from its ROC description.
// fpr may be undefined when prior_pos = 1, tpr when prior_pos = 0; otherwise
// a missing conditional raises MissingIndicatorError.
NormalizedConfusion confusion_from_roc(double prior_pos, IndicatorValue fpr, IndicatorValue tpr);

} // namespace perfsum
