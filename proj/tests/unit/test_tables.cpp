#include <doctest.h>

#include "aeromix/csv.hpp"
#include "aeromix/error.hpp"
#include "aeromix/tables.hpp"
#include "test_util.hpp"

using namespace aeromix;
using testutil::TempDir;

TEST_CASE("one well-formed station row loads") {
  TempDir dir("tables");
  const std::string path = dir.file("s.csv");
  write_text_file(path,
                  "station_id,east,north,date,pm25\n"
                  "s001,501000,3951000,2015-03-07,42.5\n");
  const auto records = load_station_table(path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].station_id == "s001");
  CHECK(records[0].pm25_raw == doctest::Approx(42.5));
  CHECK(!records[0].pm25_corrected.has_value());
}

TEST_CASE("duplicate (station_id, date) is rejected") {
  TempDir dir("tables");
  const std::string path = dir.file("dup.csv");
  write_text_file(path,
                  "station_id,east,north,date,pm25\n"
                  "s001,501000,3951000,2015-03-07,42.5\n"
                  "s001,501000,3951000,2015-03-07,44.0\n");
  CHECK_THROWS_WITH_AS(load_station_table(path), doctest::Contains("duplicate"), Error);
}

TEST_CASE("negative pm25 and missing columns are rejected") {
  TempDir dir("tables");
  const std::string bad_value = dir.file("neg.csv");
  write_text_file(bad_value,
                  "station_id,east,north,date,pm25\n"
                  "s001,0,0,2015-03-07,-1\n");
  CHECK_THROWS_AS(load_station_table(bad_value), Error);

  const std::string bad_header = dir.file("hdr.csv");
  write_text_file(bad_header, "station_id,east,north,date\ns001,0,0,2015-03-07\n");
  CHECK_THROWS_WITH_AS(load_station_table(bad_header),
                       doctest::Contains("missing column"), Error);
}

TEST_CASE("met row out of range rh is rejected") {
  TempDir dir("tables");
  const std::string path = dir.file("met.csv");
  write_text_file(path,
                  "east,north,date,dpt,t,blh,sp,lai_hv,lai_lv,ws,wd,cdir,uvb,rh\n"
                  "0,0,2015-03-07,278,288,800,88000,1,0.8,3,3.1,1e6,2e5,101\n");
  CHECK_THROWS_WITH_AS(load_met_table(path), doctest::Contains("rh"), Error);
}

TEST_CASE("met rejects non-positive blh and unparsable numbers") {
  TempDir dir("tables");
  const std::string blh = dir.file("blh.csv");
  write_text_file(blh,
                  "east,north,date,dpt,t,blh,sp,lai_hv,lai_lv,ws,wd,cdir,uvb,rh\n"
                  "0,0,2015-03-07,278,288,0,88000,1,0.8,3,3.1,1e6,2e5,50\n");
  CHECK_THROWS_AS(load_met_table(blh), Error);

  const std::string nan = dir.file("nan.csv");
  write_text_file(nan,
                  "east,north,date,dpt,t,blh,sp,lai_hv,lai_lv,ws,wd,cdir,uvb,rh\n"
                  "0,0,2015-03-07,abc,288,800,88000,1,0.8,3,3.1,1e6,2e5,50\n");
  CHECK_THROWS_AS(load_met_table(nan), Error);
}

TEST_CASE("station and met tables round trip") {
  TempDir dir("tables");
  std::vector<StationRecord> stations;
  StationRecord s;
  s.station_id = "s042";
  s.location = {512345.5, 3967890.25};
  s.date = Date{2014, 7, 19};
  s.pm25_raw = 33.125;
  stations.push_back(s);
  const std::string spath = dir.file("stations.csv");
  write_station_table(stations, spath);
  const auto sback = load_station_table(spath);
  REQUIRE(sback.size() == 1);
  CHECK(sback[0].station_id == "s042");
  CHECK(sback[0].location.east == 512345.5);
  CHECK(sback[0].pm25_raw == 33.125);

  std::vector<MetRecord> met;
  MetRecord m;
  m.location = {500500.0, 3950500.0};
  m.date = Date{2014, 7, 19};
  for (std::size_t v = 0; v < MetRecord::kNumVars; ++v) {
    m.set_var(v, 1.5 + static_cast<double>(v));
  }
  m.blh = 777.75;
  m.rh = 52.5;
  met.push_back(m);
  const std::string mpath = dir.file("met.csv");
  write_met_table(met, mpath);
  const auto mback = load_met_table(mpath);
  REQUIRE(mback.size() == 1);
  CHECK(mback[0].blh == 777.75);
  CHECK(mback[0].rh == 52.5);
  CHECK(mback[0].dpt == 1.5);
}
