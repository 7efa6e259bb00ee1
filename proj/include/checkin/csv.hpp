#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace checkin::csv {

using Row = std::vector<std::string>;

// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

std::string join(const Row& fields);

// RFC 4180 records; quoted fields may span lines. Accepts LF or CRLF.
std::vector<Row> parse(std::string_view text);

// Header row plus data rows. Throws IoFailure when the file is unreadable or
// its header differs from `expected_header`.
std::vector<Row> read_table(const std::filesystem::path& path, const Row& expected_header);

// Shortest decimal form that round-trips the double.
std::string format_double(double value);

// Fixed-point with `digits` decimals, for report columns.
std::string format_fixed(double value, int digits);

double parse_double(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

}  // namespace checkin::csv
