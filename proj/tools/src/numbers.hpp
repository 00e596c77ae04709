#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ewhi::cli {

/// 17 significant digits; "nan" / "inf" / "-inf" for non-finite values.
std::string format_number(double v);

/// Shortest text that parses back to v.
std::string format_shortest(double v);

std::optional<double> parse_number(std::string_view text);

/// Trimmed fields split on `sep`.
std::vector<std::string> split(std::string_view text, char sep);

std::vector<std::string> split_whitespace(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace ewhi::cli
