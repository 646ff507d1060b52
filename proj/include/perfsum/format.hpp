#pragma once

#include <string>

#include "perfsum/indicator.hpp"

namespace perfsum {

// Shortest decimal text that round-trips to the same binary64 value.
std::string format_real(double v);

// format_real for defined values, the literal token "NA" otherwise.
std::string format_indicator(const IndicatorValue& v);

} // namespace perfsum
