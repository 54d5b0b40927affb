#include <doctest.h>

#include <cmath>

#include "aeromix/error.hpp"
#include "aeromix/window.hpp"
#include "test_util.hpp"

using namespace aeromix;
using testutil::random_grid;

namespace {

AODGrid constant_grid(int n, float value, int qa) {
  AODGrid g = random_grid(n, n, 1, 1.0);
  for (auto& v : g.values) v = value;
  for (auto& q : g.qa) q = static_cast<std::uint8_t>(qa);
  return g;
}

}  // namespace

TEST_CASE("constant window: mean, zero std, full weight") {
  const AODGrid g = constant_grid(5, 0.30f, 3);
  const WindowSample s = extract_window(g, g.geom.cell_center(2, 2));
  CHECK(s.valid);
  CHECK(s.n_valid == 9);
  CHECK(s.mean_aod == doctest::Approx(0.30).epsilon(1e-7));
  CHECK(s.std_aod == doctest::Approx(0.0));
  CHECK(s.weight == doctest::Approx(1.0));
}

TEST_CASE("spread above the threshold marks the sample unreliable") {
  AODGrid g = constant_grid(5, 0.30f, 3);
  // Center window spans rows/cols 1..3.
  g.values[g.geom.index(1, 1)] = 0.10f;
  g.values[g.geom.index(3, 3)] = 0.50f;
  const WindowSample s = extract_window(g, g.geom.cell_center(2, 2));
  CHECK(s.std_aod > 0.02);
  CHECK(!s.valid);
  CHECK(s.weight == doctest::Approx(1.0));  // weight reported regardless
}

TEST_CASE("fully nodata window") {
  AODGrid g = constant_grid(5, 0.30f, 3);
  for (auto& v : g.values) v = g.geom.nodata;
  const WindowSample s = extract_window(g, g.geom.cell_center(2, 2));
  CHECK(s.n_valid == 0);
  CHECK(!s.valid);
  CHECK(s.weight == doctest::Approx(0.0));
}

TEST_CASE("weight counts best-quality pixels out of nine") {
  AODGrid g = constant_grid(5, 0.30f, 0);
  g.qa[g.geom.index(1, 1)] = 3;
  g.qa[g.geom.index(2, 2)] = 3;
  g.qa[g.geom.index(3, 2)] = 3;
  const WindowSample s = extract_window(g, g.geom.cell_center(2, 2));
  CHECK(s.weight == doctest::Approx(3.0 / 9.0));
  CHECK(s.valid);
}

TEST_CASE("weight equals qa3 count over nine exactly across random grids") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const AODGrid g = random_grid(7, 7, seed, 0.75);
    const WindowSample s = extract_window(g, g.geom.cell_center(3, 3));
    int best = 0;
    for (int r = 2; r <= 4; ++r) {
      for (int c = 2; c <= 4; ++c) {
        if (g.valid(r, c) && g.qa_code(r, c) == 3) ++best;
      }
    }
    CHECK(s.weight == static_cast<double>(best) / 9.0);
    const double k9 = s.weight * 9.0;
    CHECK(k9 == doctest::Approx(std::round(k9)));  // only multiples of 1/9
  }
}

TEST_CASE("edge window uses available pixels but keeps the /9 denominator") {
  const AODGrid g = constant_grid(5, 0.25f, 3);
  const WindowSample s = extract_window(g, g.geom.cell_center(0, 0));
  CHECK(s.n_valid == 4);  // corner window
  CHECK(s.valid);
  CHECK(s.weight == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("location outside the grid is an error") {
  const AODGrid g = constant_grid(5, 0.25f, 3);
  Location outside = g.geom.cell_center(0, 0);
  outside.east -= 10 * g.geom.cellsize;
  CHECK_THROWS_AS(extract_window(g, outside), Error);
}

TEST_CASE("quality weight handles missing codes and rejects bad ones") {
  const int all3[9] = {3, 3, 3, 3, 3, 3, 3, 3, 3};
  CHECK(fusion::quality_weight(all3, 9) == doctest::Approx(1.0));
  const int three[9] = {3, 0, 1, 3, 2, 0, 3, 1, 0};
  CHECK(fusion::quality_weight(three, 9) == doctest::Approx(1.0 / 3.0));
  const int none[4] = {0, 1, 2, 2};  // five pixels missing count as non-best
  CHECK(fusion::quality_weight(none, 4) == doctest::Approx(0.0));
  const int mixed[4] = {3, 0, 3, 2};
  CHECK(fusion::quality_weight(mixed, 4) == doctest::Approx(2.0 / 9.0));
  const int bad[2] = {4, 0};
  CHECK_THROWS_AS(fusion::quality_weight(bad, 2), Error);
}
