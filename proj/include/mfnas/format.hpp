#pragma once

#include <string>
#include <string_view>

namespace mfnas {

/// Shortest decimal that parses back to exactly the same double.
std::string format_double(double v);

/// Strict parse of a full decimal field; throws Error on trailing junk.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

}  // namespace mfnas
