#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace glssbm::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes. Surrounding whitespace of unquoted fields is trimmed.
std::vector<std::string> split(std::string_view line);

/// Quotes a field if it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Shortest decimal representation that round-trips; "nan" for NaN.
std::string format_double(double v);

/// Reads every line of a text file, stripping a trailing '\r'.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Opens a file for writing, throwing IoError on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace glssbm::csv
