#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "perfsum/confusion.hpp"
#include "perfsum/indicator.hpp"

namespace perfsum {

// One evaluation source (a video) with its normalized confusion.
struct SourceRecord {
    std::string video_id;
    std::string category;                // may be empty
    std::optional<std::uint64_t> size;   // pixels x frames, >= 1 when present
    NormalizedConfusion confusion;
};

// Non-empty ordered collection of sources with unique ids.
class SourceSet {
public:
    // Throws std::invalid_argument when empty, on duplicate ids, or on a
    // zero size.
    explicit SourceSet(std::vector<SourceRecord> records);

    std::size_t size() const noexcept { return records_.size(); }
    const SourceRecord& operator[](std::size_t i) const noexcept { return records_[i]; }
    auto begin() const noexcept { return records_.begin(); }
    auto end() const noexcept { return records_.end(); }

    bool contains(std::string_view id) const;
    // Throws std::out_of_range for an unknown id.
    const SourceRecord& at_id(std::string_view id) const;

private:
    std::vector<SourceRecord> records_;
    std::unordered_map<std::string, std::size_t> index_;
};

// How the selection distribution over sources is built.
class WeightScheme {
public:
    enum class Kind : std::uint8_t {
        uniform,
        size_proportional,
        category_hierarchical,
        explicit_weights,
    };

    static WeightScheme uniform() noexcept { return WeightScheme(Kind::uniform); }
    static WeightScheme size_proportional() noexcept {
        return WeightScheme(Kind::size_proportional);
    }
    static WeightScheme category_hierarchical() noexcept {
        return WeightScheme(Kind::category_hierarchical);
    }
    static WeightScheme explicit_weights(std::map<std::string, double> weights) {
        WeightScheme s(Kind::explicit_weights);
        s.weights_ = std::move(weights);
        return s;
    }

    Kind kind() const noexcept { return kind_; }
    const std::map<std::string, double>& weights() const noexcept { return weights_; }
    std::string_view name() const noexcept;

private:
    explicit WeightScheme(Kind kind) noexcept : kind_(kind) {}

    Kind kind_;
    std::map<std::string, double> weights_;
};

// The selection distribution itself: one probability per source id, summing
// to one. Iteration is in id order, which makes every downstream reduction
// deterministic and independent of the input permutation.
class WeightVector {
public:
    // Throws std::invalid_argument when a weight is outside [0,1] or the sum
    // differs from 1 beyond kProbabilityTolerance.
    explicit WeightVector(std::map<std::string, double> weights);

    double at(const std::string& id) const;
    const std::map<std::string, double>& entries() const noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }

    // Checks that the keys are exactly the ids of `set`; throws WeightError.
    void require_matching(const SourceSet& set) const;

private:
    std::map<std::string, double> weights_;
};

// Builds the selection distribution for a scheme.
// Errors: MissingSizeError, MissingCategoryError, AllZeroWeightsError,
// WeightError (explicit weights not covering the set, or negative).
WeightVector make_weights(const SourceSet& set, const WeightScheme& scheme);

// Result of summarizing a source set: the summarized normalized confusion is
// the single source of truth; every indicator is derived from it.
class Summary {
public:
    Summary(NormalizedConfusion confusion, WeightVector weights,
            std::map<IndicatorSpec, IndicatorValue> cache = {});

    const NormalizedConfusion& confusion() const noexcept { return confusion_; }
    const WeightVector& weights() const noexcept { return weights_; }

    // Cached value when present, otherwise computed from the summarized
    // confusion. Both paths agree by construction.
    IndicatorValue indicator(const IndicatorSpec& spec) const;
    const std::map<IndicatorSpec, IndicatorValue>& cached_indicators() const noexcept {
        return cache_;
    }

private:
    NormalizedConfusion confusion_;
    WeightVector weights_;
    std::map<IndicatorSpec, IndicatorValue> cache_;
};

// Summarizes the set under the two-stage draw: each summarized outcome
// probability is the weight-mixed per-source probability. Indicators listed
// in `cache_specs` are evaluated on the result and cached.
Summary summarize(const SourceSet& set, const WeightVector& weights,
                  std::span<const IndicatorSpec> cache_specs = {});

// Summarized conditional indicator computed as the ratio of two mixed
// unconditional masses. Per-source undefined entries carry zero conditioning
// mass and drop out on their own. Undefined iff the mixed conditioning mass
// is zero. Throws InvalidSpecError for a derived spec.
IndicatorValue summarize_conditional(const SourceSet& set, const WeightVector& weights,
                                     const IndicatorSpec& spec);

enum class UndefinedPolicy : std::uint8_t { error, skip };

// The legacy benchmark procedure: unweighted mean per category, then
// unweighted mean across categories, applied to one indicator at a time.
// Errors: MissingCategoryError, UndefinedIndicatorError (policy = error),
// NoDefinedValuesError (policy = skip and nothing survives).
IndicatorValue summarize_legacy_mean(const SourceSet& set, const IndicatorSpec& spec,
                                     UndefinedPolicy policy);

struct RankedEntry {
    std::string algorithm;
    IndicatorValue value;
    int rank = 0;
};

// Dense ranking: tied values share a rank and are listed lexicographically;
// undefined values share the last rank. Throws EmptyInputError when the map
// is empty or holds no defined value.
std::vector<RankedEntry> rank_algorithms(const std::map<std::string, IndicatorValue>& values,
                                         bool descending = true);

} // namespace perfsum
