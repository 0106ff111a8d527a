#pragma once

// Minimal RFC 4180 field handling shared by the CSV readers and writers.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace chainlet::csv {

/// Quotes a field when it holds a comma, quote or line break.
std::string escape(std::string_view field);

/// Splits one line. Throws DataError on an unterminated quote.
std::vector<std::string> split(std::string_view line);

/// Parses a non-negative decimal integer. Throws DataError naming `field`.
std::uint64_t parse_uint(std::string_view text, std::string_view field);

}  // namespace chainlet::csv
