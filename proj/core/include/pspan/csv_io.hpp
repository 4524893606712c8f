#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pspan::csv {

/// Splits one CSV record. Handles double-quoted fields with "" escapes;
/// surrounding whitespace of unquoted fields is trimmed.
std::vector<std::string> split_line(std::string_view line);

/// Shortest decimal text that round-trips to exactly `value`.
std::string format_exact(double value);

/// `value` with `digits` significant digits, for human-facing tables.
std::string format_significant(double value, int digits = 6);

/// Writes one record, quoting fields that need it.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace pspan::csv
