#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal helpers for the flat comma-separated files the harness reads and
// writes. No quoting: none of our fields contain commas.
namespace setd::csv {

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view text);

// Shortest round-trippable text for a double ("inf", "-inf", "nan" for
// non-finite values).
std::string format_double(double value);

// Throw ConfigError on malformed text.
double parse_double(std::string_view text);
long parse_long(std::string_view text);
bool parse_bool01(std::string_view text);
std::vector<double> parse_double_list(std::string_view text, char sep = ',');

}  // namespace setd::csv
