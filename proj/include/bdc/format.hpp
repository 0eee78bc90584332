#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace bdc {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Parses the whole of `text` as a double; nullopt on any leftover or error.
std::optional<double> parse_double(std::string_view text);

}  // namespace bdc
