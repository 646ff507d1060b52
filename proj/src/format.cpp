#include "perfsum/format.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace perfsum {

std::string format_real(double v) {
    std::array<char, 32> buffer{};
    auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), v);
    if (ec != std::errc{}) throw std::logic_error("failed to format a real value");
    return std::string(buffer.data(), end);
}

std::string format_indicator(const IndicatorValue& v) {
    return v.is_defined() ? format_real(v.value()) : std::string("NA");
}

} // namespace perfsum
