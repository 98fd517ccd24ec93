#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace codebench::text {

// Converts CRLF and lone CR to LF.
std::string normalize_newlines(std::string_view s);

// Splits on '\n'. A trailing newline does not produce an extra empty line;
// the empty string has zero lines.
std::vector<std::string_view> split_lines(std::string_view s);

std::size_t count_lines(std::string_view s);

std::string_view trim(std::string_view s);
std::string_view rtrim(std::string_view s);
std::string_view ltrim(std::string_view s);

bool is_blank(std::string_view s);

// Removes trailing whitespace from every line and trailing blank lines.
std::string normalize_trailing_whitespace(std::string_view s);

std::string to_lower(std::string_view s);

bool is_ident_char(char c);

std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string join(const std::vector<std::string_view>& parts, std::string_view sep);

// Fixed-point rendering with `decimals` digits; never locale dependent.
std::string fixed(double value, int decimals);

}  // namespace codebench::text
