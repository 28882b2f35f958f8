#pragma once

// Small text helpers shared by the CSV writers and parsers. Doubles are
// rendered shortest-round-trip so emitted files parse back bit-identical.

#include <string>
#include <string_view>
#include <vector>

namespace diwmrac {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_shortest(double v);

/// Parse a full string as a double; throws ConfigError on trailing junk,
/// empty input, or range errors.
double parse_double_strict(std::string_view s);

/// Split one CSV row on commas. No quoting: none of the emitted fields
/// ever contain commas.
std::vector<std::string> split_csv_row(std::string_view line);

/// Split text into lines, tolerating a missing trailing newline.
std::vector<std::string> split_lines(std::string_view text);

} // namespace diwmrac
