#include "perfsum/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "perfsum/errors.hpp"

namespace perfsum {

SourceSet::SourceSet(std::vector<SourceRecord> records) : records_(std::move(records)) {
    if (records_.empty()) throw std::invalid_argument("source set must not be empty");
    index_.reserve(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const SourceRecord& rec = records_[i];
        if (rec.video_id.empty())
            throw std::invalid_argument("source record has an empty video id");
        if (rec.size && *rec.size == 0)
            throw std::invalid_argument("source '" + rec.video_id + "' has zero size");
        if (!index_.emplace(rec.video_id, i).second)
            throw std::invalid_argument("duplicate video id '" + rec.video_id + "'");
    }
}

bool SourceSet::contains(std::string_view id) const {
    return index_.find(std::string(id)) != index_.end();
}

const SourceRecord& SourceSet::at_id(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end())
        throw std::out_of_range("unknown video id '" + std::string(id) + "'");
    return records_[it->second];
}

std::string_view WeightScheme::name() const noexcept {
    switch (kind_) {
    case Kind::uniform: return "uniform";
    case Kind::size_proportional: return "size";
    case Kind::category_hierarchical: return "hierarchical";
    case Kind::explicit_weights: return "explicit";
    }
    return "?";
}

WeightVector::WeightVector(std::map<std::string, double> weights)
    : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("weight vector must not be empty");
    double sum = 0.0;
    for (auto& [id, w] : weights_) {
        if (std::isnan(w) || w < -kProbabilityTolerance || w > 1.0 + kProbabilityTolerance)
            throw std::invalid_argument("weight of '" + id + "' outside [0,1]: " +
                                        std::to_string(w));
        w = std::clamp(w, 0.0, 1.0);
        sum += w;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance)
        throw std::invalid_argument("weights sum to " + std::to_string(sum) + ", expected 1");
}

double WeightVector::at(const std::string& id) const {
    auto it = weights_.find(id);
    if (it == weights_.end())
        throw std::out_of_range("no weight for video id '" + id + "'");
    return it->second;
}

void WeightVector::require_matching(const SourceSet& set) const {
    if (set.size() != weights_.size())
        throw WeightError("weight vector covers " + std::to_string(weights_.size()) +
                          " videos, source set has " + std::to_string(set.size()));
    for (const SourceRecord& rec : set)
        if (weights_.find(rec.video_id) == weights_.end())
            throw WeightError("no weight for video '" + rec.video_id + "'");
}

WeightVector make_weights(const SourceSet& set, const WeightScheme& scheme) {
    std::map<std::string, double> weights;
    switch (scheme.kind()) {
    case WeightScheme::Kind::uniform: {
        const double w = 1.0 / static_cast<double>(set.size());
        for (const SourceRecord& rec : set) weights.emplace(rec.video_id, w);
        break;
    }
    case WeightScheme::Kind::size_proportional: {
        double total = 0.0;
        for (const SourceRecord& rec : set) {
            if (!rec.size)
                throw MissingSizeError("video '" + rec.video_id +
                                       "' has no size; size-proportional weights need one");
            total += static_cast<double>(*rec.size);
        }
        for (const SourceRecord& rec : set)
            weights.emplace(rec.video_id, static_cast<double>(*rec.size) / total);
        break;
    }
    case WeightScheme::Kind::category_hierarchical: {
        std::map<std::string, std::size_t> per_category;
        for (const SourceRecord& rec : set) {
            if (rec.category.empty())
                throw MissingCategoryError("video '" + rec.video_id +
                                           "' has no category; hierarchical weights need one");
            ++per_category[rec.category];
        }
        const double categories = static_cast<double>(per_category.size());
        for (const SourceRecord& rec : set)
            weights.emplace(rec.video_id,
                            1.0 / (categories *
                                   static_cast<double>(per_category.at(rec.category))));
        break;
    }
    case WeightScheme::Kind::explicit_weights: {
        const auto& given = scheme.weights();
        double total = 0.0;
        for (const SourceRecord& rec : set) {
            auto it = given.find(rec.video_id);
            if (it == given.end())
                throw WeightError("explicit weights do not cover video '" + rec.video_id + "'");
            if (std::isnan(it->second) || it->second < 0.0)
                throw WeightError("explicit weight of '" + rec.video_id +
                                  "' is negative: " + std::to_string(it->second));
            total += it->second;
        }
        for (const auto& [id, w] : given)
            if (!set.contains(id))
                throw WeightError("explicit weight for unknown video '" + id + "'");
        if (total <= 0.0) throw AllZeroWeightsError("explicit weights are all zero");
        for (const SourceRecord& rec : set)
            weights.emplace(rec.video_id, given.at(rec.video_id) / total);
        break;
    }
    }
    return WeightVector(std::move(weights));
}

Summary::Summary(NormalizedConfusion confusion, WeightVector weights,
                 std::map<IndicatorSpec, IndicatorValue> cache)
    : confusion_(confusion), weights_(std::move(weights)), cache_(std::move(cache)) {}

IndicatorValue Summary::indicator(const IndicatorSpec& spec) const {
    auto it = cache_.find(spec);
    if (it != cache_.end()) return it->second;
    return indicator_value(confusion_, spec);
}

Summary summarize(const SourceSet& set, const WeightVector& weights,
                  std::span<const IndicatorSpec> cache_specs) {
    weights.require_matching(set);
    std::array<double, 4> mixed{};
    // Id-sorted iteration keeps the reduction deterministic and independent
    // of the record permutation.
    for (const auto& [id, w] : weights.entries()) {
        const NormalizedConfusion& nc = set.at_id(id).confusion;
        for (Outcome o : kAllOutcomes) mixed[outcome_index(o)] += w * nc.probability(o);
    }
    NormalizedConfusion confusion(mixed[0], mixed[1], mixed[2], mixed[3]);
    std::map<IndicatorSpec, IndicatorValue> cache;
    for (const IndicatorSpec& spec : cache_specs)
        cache.emplace(spec, indicator_value(confusion, spec));
    return Summary(confusion, weights, std::move(cache));
}

IndicatorValue summarize_conditional(const SourceSet& set, const WeightVector& weights,
                                     const IndicatorSpec& spec) {
    if (!spec.is_probabilistic())
        throw InvalidSpecError("summarize_conditional needs a probabilistic indicator, got " +
                               spec.name());
    weights.require_matching(set);
    const OutcomeSet condition = spec.condition();
    const OutcomeSet both = spec.event() & condition;
    double condition_mass = 0.0;
    double event_mass = 0.0;
    for (const auto& [id, w] : weights.entries()) {
        const NormalizedConfusion& nc = set.at_id(id).confusion;
        condition_mass += w * nc.mass(condition);
        event_mass += w * nc.mass(both);
    }
    if (condition_mass <= 0.0) return IndicatorValue::undefined();
    return IndicatorValue::defined(std::min(event_mass / condition_mass, 1.0));
}

IndicatorValue summarize_legacy_mean(const SourceSet& set, const IndicatorSpec& spec,
                                     UndefinedPolicy policy) {
    struct CategoryAccumulator {
        double sum = 0.0;
        std::size_t defined = 0;
    };
    std::map<std::string, CategoryAccumulator> categories;
    for (const SourceRecord& rec : set) {
        if (rec.category.empty())
            throw MissingCategoryError("video '" + rec.video_id +
                                       "' has no category; the legacy mean needs one");
        CategoryAccumulator& acc = categories[rec.category];
        IndicatorValue v = indicator_value(rec.confusion, spec);
        if (!v.is_defined()) {
            if (policy == UndefinedPolicy::error)
                throw UndefinedIndicatorError("indicator " + spec.name() +
                                              " is undefined for video '" + rec.video_id + "'");
            continue;
        }
        acc.sum += v.value();
        ++acc.defined;
    }
    double outer_sum = 0.0;
    std::size_t outer_count = 0;
    for (const auto& [category, acc] : categories) {
        if (acc.defined == 0) continue; // dropped from the outer mean
        outer_sum += acc.sum / static_cast<double>(acc.defined);
        ++outer_count;
    }
    if (outer_count == 0)
        throw NoDefinedValuesError("indicator " + spec.name() +
                                   " is undefined for every video");
    return IndicatorValue::defined(
        std::min(outer_sum / static_cast<double>(outer_count), 1.0));
}

std::vector<RankedEntry> rank_algorithms(const std::map<std::string, IndicatorValue>& values,
                                         bool descending) {
    if (values.empty()) throw EmptyInputError("nothing to rank");
    std::vector<RankedEntry> entries;
    entries.reserve(values.size());
    bool any_defined = false;
    for (const auto& [algorithm, value] : values) {
        any_defined = any_defined || value.is_defined();
        entries.push_back({algorithm, value, 0});
    }
    if (!any_defined) throw EmptyInputError("no defined value to rank");

    // Defined values first; equal values keep the lexicographic map order.
    std::stable_sort(entries.begin(), entries.end(),
                     [descending](const RankedEntry& a, const RankedEntry& b) {
                         if (a.value.is_defined() != b.value.is_defined())
                             return a.value.is_defined();
                         if (!a.value.is_defined()) return false;
                         if (a.value.value() == b.value.value()) return false;
                         return descending ? a.value.value() > b.value.value()
                                           : a.value.value() < b.value.value();
                     });

    int rank = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i == 0) {
            rank = 1;
        } else {
            const RankedEntry& prev = entries[i - 1];
            const RankedEntry& cur = entries[i];
            const bool tied = prev.value.is_defined() == cur.value.is_defined() &&
                              (!cur.value.is_defined() ||
                               prev.value.value() == cur.value.value());
            if (!tied) ++rank;
        }
        entries[i].rank = rank;
    }
    return entries;
}

} // namespace perfsum
