#pragma once

#include <array>
#include <cstdint>

#include "perfsum/outcome.hpp"

namespace perfsum {

// Tolerance applied to every probability invariant (sums to one, unit range).
inline constexpr double kProbabilityTolerance = 1e-12;

// Raw pixel tallies of one evaluation source. Counts stay exact integers
// until normalization.
struct ConfusionCounts {
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tp = 0;

    constexpr std::uint64_t count(Outcome o) const noexcept {
        switch (o) {
        case Outcome::tn: return tn;
        case Outcome::fp: return fp;
        case Outcome::fn: return fn;
        case Outcome::tp: return tp;
        }
        return 0;
    }

    constexpr std::uint64_t total() const noexcept { return tn + fp + fn + tp; }

    constexpr ConfusionCounts& operator+=(const ConfusionCounts& other) noexcept {
        tn += other.tn;
        fp += other.fp;
        fn += other.fn;
        tp += other.tp;
        return *this;
    }

    friend constexpr ConfusionCounts operator+(ConfusionCounts a,
                                               const ConfusionCounts& b) noexcept {
        a += b;
        return a;
    }

    friend constexpr bool operator==(const ConfusionCounts&, const ConfusionCounts&) noexcept =
        default;
};

// The four outcome probabilities of one source: the joint distribution of
// (ground truth, prediction) under a uniform draw of one pixel.
class NormalizedConfusion {
public:
    // Components must lie in [0,1] and sum to 1, within kProbabilityTolerance;
    // throws std::invalid_argument otherwise.
    NormalizedConfusion(double tn, double fp, double fn, double tp);

    double probability(Outcome o) const noexcept { return p_[outcome_index(o)]; }
    double tn() const noexcept { return p_[0]; }
    double fp() const noexcept { return p_[1]; }
    double fn() const noexcept { return p_[2]; }
    double tp() const noexcept { return p_[3]; }

    // Total probability mass of the outcomes in `set`.
    double mass(OutcomeSet set) const noexcept;

    friend bool operator==(const NormalizedConfusion&, const NormalizedConfusion&) noexcept =
        default;

private:
    std::array<double, 4> p_{};
};

// Scales counts into outcome probabilities.
// Throws ZeroTotalError when all four counts are zero.
NormalizedConfusion normalize(const ConfusionCounts& counts);

} // namespace perfsum
