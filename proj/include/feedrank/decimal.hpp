#pragma once

#include <string>
#include <string_view>

namespace feedrank {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Inverse of format_double. Throws InvalidInput on trailing garbage or empty input.
double parse_double(std::string_view text);

}  // namespace feedrank
