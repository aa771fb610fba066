#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace beamid::detail {

/// Shortest round-trippable representation (17 significant digits at most).
std::string fmt_double(double v);

std::vector<std::string> split_csv_line(std::string_view line);

double parse_double(std::string_view token, std::string_view context);

}  // namespace beamid::detail
