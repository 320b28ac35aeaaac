#pragma once

#include <string>
#include <string_view>

namespace qpplab {

// Shortest decimal text that parses back to exactly `value`.
std::string format_exact(double value);

// Fixed-point rendering used in human-readable reports.
std::string format_fixed(double value, int decimals = 3);

// Strict real-number parse of a whole field; false on trailing garbage,
// empty input, or a non-finite result.
bool parse_real(std::string_view text, double& out);
bool parse_integer(std::string_view text, long long& out);

}  // namespace qpplab
