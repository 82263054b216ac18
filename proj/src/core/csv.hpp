#ifndef FANOVA_CSV_HPP
#define FANOVA_CSV_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fanova::csv {

/// Splits one CSV record. Handles double-quoted fields with embedded commas
/// and escaped quotes (""). Leading/trailing whitespace outside quotes is kept.
std::vector<std::string> split_record(const std::string& line);

/// Reads the next record, skipping blank lines. Returns false at EOF.
bool read_record(std::istream& in, std::vector<std::string>& fields);

/// Quotes a field if it contains a comma, quote, or newline.
std::string escape_field(const std::string& field);

/// Joins fields into one CSV record (no trailing newline).
std::string join_record(const std::vector<std::string>& fields);

/// Floats serialized with 12 significant digits.
std::string format_double(double value);

/// Percentages reported with 2 decimals.
std::string format_percent(double value);

double parse_double(const std::string& text, const std::string& context);
std::int64_t parse_int(const std::string& text, const std::string& context);

}  // namespace fanova::csv

#endif
