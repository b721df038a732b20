#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace iwmc::csv {

using Row = std::vector<std::string>;

/// RFC-4180 parser: quoted fields may contain commas, doubled quotes and
/// line breaks. Accepts LF or CRLF line endings; a trailing newline does
/// not produce an empty record. A leading UTF-8 BOM is skipped.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace iwmc::csv
