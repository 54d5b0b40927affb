#include <doctest.h>

#include <cmath>

#include "aeromix/error.hpp"
#include "aeromix/training.hpp"
#include "test_util.hpp"

using namespace aeromix;
using testutil::TempDir;

namespace {

MetRecord met_at(const Location& loc, const Date& date) {
  MetRecord met;
  met.location = loc;
  met.date = date;
  met.dpt = 278;
  met.t = 288;
  met.blh = 800;
  met.sp = 88000;
  met.lai_hv = 1.0;
  met.lai_lv = 0.8;
  met.ws = 3.0;
  met.wd = 3.1;
  met.cdir = 1e6;
  met.uvb = 2e5;
  met.rh = 50;
  return met;
}

StationRecord station(const std::string& id, const Date& date, double corrected) {
  StationRecord rec;
  rec.station_id = id;
  rec.location = {500000.0 + 1000.0 * id.back(), 3950000.0};
  rec.date = date;
  rec.pm25_raw = corrected / 2.0;
  rec.pm25_corrected = corrected;
  return rec;
}

}  // namespace

TEST_CASE("three stations by two days with all features gives six rows") {
  std::vector<StationRecord> stations;
  std::map<RowKey, double> aod;
  std::map<RowKey, MetRecord> met;
  for (const char* id : {"s1", "s2", "s3"}) {
    for (int d = 0; d < 2; ++d) {
      const Date date = Date{2015, 2, 1}.plus_days(d);
      stations.push_back(station(id, date, 40.0 + d));
      const RowKey key{id, date};
      aod[key] = 5e-4;
      met[key] = met_at(stations.back().location, date);
    }
  }
  const BuildResult built = build_training_matrix(aod, stations, met);
  CHECK(built.matrix.n_rows() == 6);
  CHECK(built.dropped == 0);
  CHECK(built.matrix.arity() == 15);
  CHECK(built.matrix.feature_names() == TrainingMatrix::standard_feature_names());

  // DOY for 1 Feb is 32.
  const std::size_t doy = built.matrix.feature_index("DOY");
  CHECK(built.matrix.row(0)[doy] == doctest::Approx(32.0));
}

TEST_CASE("a key lacking AOD is dropped and counted") {
  std::vector<StationRecord> stations;
  std::map<RowKey, double> aod;
  std::map<RowKey, MetRecord> met;
  const Date date{2015, 2, 1};
  for (const char* id : {"s1", "s2"}) {
    stations.push_back(station(id, date, 40.0));
    const RowKey key{id, date};
    met[key] = met_at(stations.back().location, date);
    if (std::string(id) != "s2") aod[key] = 5e-4;
  }
  const BuildResult built = build_training_matrix(aod, stations, met);
  CHECK(built.matrix.n_rows() == 1);
  CHECK(built.dropped == 1);
}

TEST_CASE("empty join is a pipeline error with diagnostics") {
  std::vector<StationRecord> stations = {station("s1", Date{2015, 2, 1}, 40.0)};
  CHECK_THROWS_WITH_AS(build_training_matrix({}, stations, {}),
                       doctest::Contains("without AOD"), Error);
}

TEST_CASE("matrix csv round trip preserves rows, keys and precision") {
  TempDir dir("training");
  TrainingMatrix m(TrainingMatrix::standard_feature_names());
  std::vector<double> row(15, 0.0);
  row[0] = 6.25e-4;
  row[1] = 501234.5;
  row[14] = 32;
  m.add_row(RowKey{"s1", Date{2015, 2, 1}}, row, 41.17);
  row[0] = 7.5e-4;
  m.add_row(RowKey{"s2", Date{2015, 2, 2}}, row, 39.0);

  const std::string path = dir.file("m.csv");
  write_training_matrix(m, path);
  const TrainingMatrix back = load_training_matrix(path);
  REQUIRE(back.n_rows() == 2);
  CHECK(back.key(0).station_id == "s1");
  CHECK(back.key(1).date == Date{2015, 2, 2});
  CHECK(back.row(0)[0] == 6.25e-4);
  CHECK(back.target(0) == 41.17);
}

TEST_CASE("matrix validation rejects non-finite features and negative targets") {
  TrainingMatrix m({"a", "b"});
  CHECK_THROWS_AS(m.add_row(RowKey{"s", Date{}}, {1.0}, 1.0), Error);  // arity
  CHECK_THROWS_AS(
      m.add_row(RowKey{"s", Date{}}, {1.0, std::nan("")}, 1.0), Error);
  CHECK_THROWS_AS(m.add_row(RowKey{"s", Date{}}, {1.0, 2.0}, -0.5), Error);
}
