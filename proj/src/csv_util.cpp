#include "csv_util.hpp"

#include "beamid/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <system_error>

namespace beamid::detail {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    auto tok = line.substr(start, pos == std::string_view::npos ? line.size() - start : pos - start);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    out.emplace_back(tok);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view token, std::string_view context) {
  double v = 0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw InputError("cannot parse number '" + std::string(token) + "' in " + std::string(context));
  return v;
}

}  // namespace beamid::detail
