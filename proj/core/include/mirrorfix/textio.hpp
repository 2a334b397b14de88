#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mirrorfix {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);
std::string format_int(std::int64_t v);

/// Strict full-string numeric parses; return false on any leftover input.
bool parse_double(std::string_view text, double& out);
bool parse_int64(std::string_view text, std::int64_t& out);
bool parse_int(std::string_view text, int& out);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

std::string read_text_file(const std::string& path); // throws Error when unreadable
void write_text_file(const std::string& path, std::string_view content);

} // namespace mirrorfix
