#pragma once

// Minimal CSV helpers. Doubles are written in the shortest decimal form that
// parses back to the same binary value.

#include <string>
#include <string_view>
#include <vector>

namespace brpv::csv {

std::string format_double(double v);

/// Throws std::invalid_argument unless the whole field parses.
double parse_double(std::string_view field);
long long parse_int(std::string_view field);

/// Splits one line on commas; no quoting support (fields are numeric).
std::vector<std::string_view> split(std::string_view line);

}  // namespace brpv::csv
