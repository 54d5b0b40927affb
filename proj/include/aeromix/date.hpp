#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace aeromix {

// Proleptic Gregorian calendar day. Serial numbers count days since
// 1970-01-01.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const Date&) const = default;

  static bool is_valid(int year, int month, int day);
  static Date parse(const std::string& iso);  // strict YYYY-MM-DD
  static Date from_serial(std::int64_t days);

  std::string to_string() const;
  std::int64_t serial() const;
  int day_of_year() const;  // 1..366
  Date plus_days(int n) const;
};

}  // namespace aeromix
