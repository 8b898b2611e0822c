#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gmpc::csv {

/// 17 significant digits; strtod reads it back to the identical double.
std::string format_double(double v);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string_view> split(std::string_view line);

/// Strict parse; the whole field must be consumed. Returns false on failure.
bool parse_double(std::string_view field, double & out);

}  // namespace gmpc::csv
