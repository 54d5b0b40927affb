#include <doctest.h>

#include <cmath>

#include "aeromix/error.hpp"
#include "aeromix/kriging.hpp"
#include "aeromix/rng.hpp"

using namespace aeromix;

namespace {

VariogramModel spherical(double nugget, double sill, double range) {
  return {VariogramKind::Spherical, nugget, sill, range};
}

}  // namespace

TEST_CASE("single sample predicts its value everywhere") {
  const std::vector<PointValue> samples = {{{1000.0, 2000.0}, 13.5}};
  const VariogramModel m = spherical(0.0, 1.0, 5000.0);
  CHECK(krige(samples, m, {1000.0, 2000.0}) == doctest::Approx(13.5));
  CHECK(krige(samples, m, {90000.0, -5000.0}) == doctest::Approx(13.5));
}

TEST_CASE("target equidistant from two samples takes their mean") {
  const std::vector<PointValue> samples = {{{0.0, 0.0}, 10.0}, {{2000.0, 0.0}, 30.0}};
  const VariogramModel m = spherical(0.0, 1.0, 5000.0);
  const double v = krige(samples, m, {1000.0, 0.0});
  CHECK(v == doctest::Approx(20.0).epsilon(1e-12));
  const auto w = OrdinaryKriging(samples, m).weights({1000.0, 0.0});
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("zero-nugget kriging is exact at sample locations") {
  Rng rng(2024);
  std::vector<PointValue> samples;
  for (int i = 0; i < 25; ++i) {
    samples.push_back({{rng.uniform() * 20000.0, rng.uniform() * 20000.0},
                       5.0 + 3.0 * rng.normal()});
  }
  for (VariogramKind kind : {VariogramKind::Spherical, VariogramKind::Exponential,
                             VariogramKind::Gaussian}) {
    const VariogramModel m{kind, 0.0, 2.5, 8000.0};
    const OrdinaryKriging kriging(samples, m);
    for (const PointValue& s : samples) {
      CHECK(std::abs(kriging.predict(s.location) - s.value) < 1e-6);
    }
  }
}

TEST_CASE("weights sum to one at arbitrary targets") {
  Rng rng(515);
  std::vector<PointValue> samples;
  for (int i = 0; i < 30; ++i) {
    samples.push_back({{rng.uniform() * 30000.0, rng.uniform() * 30000.0},
                       rng.normal()});
  }
  const VariogramModel m{VariogramKind::Exponential, 0.3, 1.8, 9000.0};
  const OrdinaryKriging kriging(samples, m);
  for (int t = 0; t < 40; ++t) {
    const Location target{rng.uniform() * 30000.0, rng.uniform() * 30000.0};
    const auto w = kriging.weights(target);
    double sum = 0.0;
    for (double wi : w) sum += wi;
    CHECK(std::abs(sum - 1.0) < 1e-10);
  }
}

TEST_CASE("duplicate sample locations survive via the jitter path") {
  // Two co-located samples make the plain system singular.
  const std::vector<PointValue> samples = {
      {{0.0, 0.0}, 10.0}, {{0.0, 0.0}, 10.0}, {{4000.0, 0.0}, 20.0}};
  const VariogramModel m = spherical(0.0, 1.0, 6000.0);
  const double v = krige(samples, m, {2000.0, 0.0});
  CHECK(std::isfinite(v));
  CHECK(v >= 10.0 - 1e-9);
  CHECK(v <= 20.0 + 1e-9);
}

TEST_CASE("sill-0 model returns the sample mean with equal weights") {
  const std::vector<PointValue> samples = {{{0.0, 0.0}, 4.0}, {{1000.0, 0.0}, 6.0}};
  const VariogramModel m = spherical(0.0, 0.0, 1000.0);
  CHECK(krige(samples, m, {500.0, 250.0}) == doctest::Approx(5.0));
}

TEST_CASE("invalid model or empty samples are rejected") {
  const std::vector<PointValue> samples = {{{0.0, 0.0}, 4.0}};
  CHECK_THROWS_AS(OrdinaryKriging({}, spherical(0.0, 1.0, 100.0)), Error);
  CHECK_THROWS_AS(OrdinaryKriging(samples, spherical(-0.1, 1.0, 100.0)), Error);
  CHECK_THROWS_AS(OrdinaryKriging(samples, spherical(0.0, 1.0, 0.0)), Error);
  CHECK_THROWS_AS(OrdinaryKriging(samples, spherical(2.0, 1.0, 100.0)), Error);
}
