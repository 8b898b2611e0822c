#include "gmpc/csv.hpp"

#include <charconv>
#include <cstdio>

namespace gmpc::csv {

std::string format_double(double v)
{
  char buf[40];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::vector<std::string_view> split(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_double(std::string_view field, double & out)
{
  if (field.empty()) { return false; }
  const char * first = field.data();
  const char * last = field.data() + field.size();
  if (*first == '+') { ++first; }
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace gmpc::csv
