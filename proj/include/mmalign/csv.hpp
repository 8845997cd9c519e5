#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mmalign::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes. Returns false on an unterminated quote.
bool split_record(std::string_view line, std::vector<std::string>& fields);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

/// Shortest representation that round-trips to the same double.
std::string format_double(double v);

/// Strict full-field number parse; false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long long& out);

/// Joins escaped fields with commas and a trailing newline.
std::string row(const std::vector<std::string>& fields);

}  // namespace mmalign::csv
