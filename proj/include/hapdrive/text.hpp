#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small helpers for the line-oriented text formats (tracks, run logs).
namespace hapdrive::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
void append_double(std::string& out, double value);

/// Parses the whole token as a double; throws FormatError otherwise.
double parse_double(std::string_view token);
long long parse_int(std::string_view token);

std::vector<std::string_view> split(std::string_view line, char sep);
std::vector<std::string_view> split_whitespace(std::string_view line);

}  // namespace hapdrive::text
