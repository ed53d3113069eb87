#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sigdrift::detail {

// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);

// Whole-field parse; throws ParseError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

std::string_view trim(std::string_view text);

// Reads a line, stripping a trailing '\r'. Returns false at EOF.
bool next_line(std::istream& in, std::string& line);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace sigdrift::detail
