#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace deckfuse::text {

// Shortest decimal representation that round-trips the exact double.
// Locale-independent: '.' decimal point, never a thousands separator.
std::string format_double(double v);

// Fixed-point with the given number of decimals (for report presentation).
std::string format_fixed(double v, int decimals);

// Strict full-string parse; nullopt on any trailing garbage or empty input.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace deckfuse::text
