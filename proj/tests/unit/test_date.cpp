#include <doctest.h>

#include "aeromix/date.hpp"
#include "aeromix/error.hpp"

using namespace aeromix;

TEST_CASE("date parse and format round trip") {
  const Date d = Date::parse("2015-12-29");
  CHECK(d.year == 2015);
  CHECK(d.month == 12);
  CHECK(d.day == 29);
  CHECK(d.to_string() == "2015-12-29");
}

TEST_CASE("date rejects malformed input") {
  CHECK_THROWS_AS(Date::parse("2015-13-01"), Error);
  CHECK_THROWS_AS(Date::parse("2015-02-30"), Error);
  CHECK_THROWS_AS(Date::parse("2015/02/03"), Error);
  CHECK_THROWS_AS(Date::parse("15-02-03"), Error);
  CHECK_THROWS_AS(Date::parse(""), Error);
}

TEST_CASE("day of year") {
  CHECK(Date{2015, 1, 1}.day_of_year() == 1);
  CHECK(Date{2015, 2, 1}.day_of_year() == 32);
  CHECK(Date{2015, 12, 31}.day_of_year() == 365);
  CHECK(Date{2016, 12, 31}.day_of_year() == 366);  // leap year
  CHECK(Date{2000, 3, 1}.day_of_year() == 61);
  CHECK(Date{1900, 3, 1}.day_of_year() == 60);  // 1900 is not a leap year
}

TEST_CASE("serial round trip across many days") {
  Date d{2012, 12, 25};
  for (int i = 0; i < 800; ++i) {
    const Date back = Date::from_serial(d.serial());
    CHECK(back == d);
    d = d.plus_days(1);
  }
  CHECK(Date{1970, 1, 1}.serial() == 0);
}

TEST_CASE("ordering follows the calendar") {
  CHECK(Date{2014, 12, 31} < Date{2015, 1, 1});
  CHECK(Date{2015, 1, 2} < Date{2015, 2, 1});
}
