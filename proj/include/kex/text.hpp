#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kex {

/// Shortest decimal form that parses back to the same double.
std::string format_exact(double value);
/// Fixed-point with `decimals` digits.
std::string format_fixed(double value, int decimals);

/// Strict parse of a whole token; throws std::invalid_argument on junk.
double parse_double(std::string_view token);
long long parse_int(std::string_view token);

std::vector<std::string_view> split_ws(std::string_view line);

}  // namespace kex
