#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace codebench {

// Calendar date, ISO-8601 on the wire ("2023-10-01").
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  static Date parse(std::string_view iso);  // throws InvalidArgument
  std::string to_string() const;

  auto operator<=>(const Date&) const = default;
};

}  // namespace codebench
