#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace perfsum {

// Result of comparing a ground-truth label with a predicted label for one
// pixel. The declaration order (tn, fp, fn, tp) is the serialization order
// used everywhere.
enum class Outcome : std::uint8_t { tn = 0, fp = 1, fn = 2, tp = 3 };

inline constexpr std::array<Outcome, 4> kAllOutcomes{Outcome::tn, Outcome::fp, Outcome::fn,
                                                     Outcome::tp};

constexpr std::size_t outcome_index(Outcome o) noexcept {
    return static_cast<std::size_t>(o);
}

std::string_view to_string(Outcome o) noexcept;

// A subset of the four outcomes, stored as a 4-bit membership mask.
class OutcomeSet {
public:
    constexpr OutcomeSet() noexcept = default;
    constexpr OutcomeSet(std::initializer_list<Outcome> outcomes) noexcept {
        for (Outcome o : outcomes) bits_ |= static_cast<std::uint8_t>(mask(o));
    }

    static constexpr OutcomeSet universe() noexcept { return OutcomeSet(0b1111u); }
    // Validates bits < 16.
    static OutcomeSet from_bits(unsigned bits);

    constexpr unsigned bits() const noexcept { return bits_; }
    constexpr bool contains(Outcome o) const noexcept { return (bits_ & mask(o)) != 0; }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    constexpr bool is_universe() const noexcept { return bits_ == 0b1111u; }
    constexpr std::size_t count() const noexcept {
        return static_cast<std::size_t>(std::popcount(static_cast<unsigned>(bits_)));
    }
    constexpr bool subset_of(OutcomeSet other) const noexcept {
        return (bits_ & ~static_cast<unsigned>(other.bits_)) == 0;
    }
    constexpr bool proper_subset_of(OutcomeSet other) const noexcept {
        return subset_of(other) && bits_ != other.bits_;
    }

    friend constexpr OutcomeSet operator&(OutcomeSet a, OutcomeSet b) noexcept {
        return OutcomeSet(static_cast<unsigned>(a.bits_ & b.bits_));
    }
    friend constexpr OutcomeSet operator|(OutcomeSet a, OutcomeSet b) noexcept {
        return OutcomeSet(static_cast<unsigned>(a.bits_ | b.bits_));
    }
    friend constexpr bool operator==(OutcomeSet a, OutcomeSet b) noexcept = default;

    // Renders "{tn,fp}" with members in fixed declaration order.
    std::string to_string() const;
    // Parses the same syntax; throws InvalidSpecError on malformed input.
    static OutcomeSet parse(std::string_view text);

private:
    explicit constexpr OutcomeSet(unsigned bits) noexcept
        : bits_(static_cast<std::uint8_t>(bits)) {}

    static constexpr unsigned mask(Outcome o) noexcept {
        return 1u << static_cast<unsigned>(o);
    }

    std::uint8_t bits_ = 0;
};

} // namespace perfsum
