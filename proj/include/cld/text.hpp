#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cld::text {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Always 17 significant digits.
std::string format_double17(double value);

/// Parses a whole token as a double; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view token);
std::optional<long long> parse_int(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace cld::text
