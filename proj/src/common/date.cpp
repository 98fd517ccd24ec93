#include "codebench/common/date.hpp"

#include <charconv>
#include <cstdio>

#include "codebench/common/errors.hpp"

namespace codebench {

namespace {

int parse_field(std::string_view s, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidArgument("malformed date '" + std::string(whole) + "'");
  }
  return value;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

Date Date::parse(std::string_view iso) {
  // Accept a full timestamp and keep the date part.
  std::string_view d = iso.substr(0, 10);
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') {
    throw InvalidArgument("malformed date '" + std::string(iso) + "'");
  }
  Date out{parse_field(d.substr(0, 4), iso), parse_field(d.substr(5, 2), iso),
           parse_field(d.substr(8, 2), iso)};
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (out.month < 1 || out.month > 12) throw InvalidArgument("month out of range in '" + std::string(iso) + "'");
  int max_day = kDays[out.month - 1] + (out.month == 2 && is_leap(out.year) ? 1 : 0);
  if (out.day < 1 || out.day > max_day) throw InvalidArgument("day out of range in '" + std::string(iso) + "'");
  return out;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

}  // namespace codebench
