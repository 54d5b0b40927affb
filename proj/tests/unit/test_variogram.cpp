#include <doctest.h>

#include <cmath>

#include "aeromix/error.hpp"
#include "aeromix/kriging.hpp"
#include "aeromix/rng.hpp"
#include "aeromix/variogram.hpp"

using namespace aeromix;

namespace {

std::vector<PointValue> white_field_samples(std::size_t n, double sd, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PointValue> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples.push_back({{rng.uniform() * 50000.0, rng.uniform() * 50000.0},
                       sd * rng.normal()});
  }
  return samples;
}

}  // namespace

TEST_CASE("semivariance starts at the nugget and is monotone for all kinds") {
  for (VariogramKind kind : {VariogramKind::Spherical, VariogramKind::Exponential,
                             VariogramKind::Gaussian}) {
    const VariogramModel m{kind, 0.2, 1.0, 5000.0};
    CHECK(m.semivariance(0.0) == doctest::Approx(0.2));
    double prev = m.semivariance(0.0);
    for (int i = 1; i <= 60; ++i) {
      const double g = m.semivariance(i * 200.0);
      CHECK(g >= prev - 1e-12);
      CHECK(g <= 1.0 + 1e-12);
      prev = g;
    }
    // Reaches (nearly) the sill at the range.
    CHECK(m.semivariance(5000.0) > 0.94);
  }
}

TEST_CASE("empirical variogram of a linear ramp grows with lag") {
  std::vector<PointValue> samples;
  for (int i = 0; i < 40; ++i) {
    samples.push_back({{i * 1000.0, 0.0}, 0.01 * i});
  }
  const auto bins = empirical_variogram(samples);
  REQUIRE(bins.size() >= 3);
  for (std::size_t b = 1; b < bins.size(); ++b) {
    CHECK(bins[b].gamma > bins[b - 1].gamma);
    CHECK(bins[b].lag > bins[b - 1].lag);
    CHECK(bins[b].n_pairs > 0);
  }
}

TEST_CASE("pure-nugget white field fits sill close to nugget") {
  const auto samples = white_field_samples(220, 1.0, 321);
  const VariogramModel m = fit_variogram(samples);
  REQUIRE(m.nugget > 0.0);
  CHECK(m.sill / m.nugget <= 1.2);  // near-flat semivariance
  CHECK(m.sill >= m.nugget);
  // Partial sill is a small fraction of the total.
  CHECK((m.sill - m.nugget) <= 0.2 * m.nugget);
}

TEST_CASE("identical values fit a sill-0 model and kriging returns the constant") {
  std::vector<PointValue> samples;
  Rng rng(17);
  for (int i = 0; i < 12; ++i) {
    samples.push_back({{rng.uniform() * 10000.0, rng.uniform() * 10000.0}, 7.25});
  }
  const VariogramModel m = fit_variogram(samples);
  CHECK(m.sill == doctest::Approx(0.0));
  CHECK(krige(samples, m, {1234.0, 9876.0}) == doctest::Approx(7.25));
}

TEST_CASE("too few samples or co-located samples are errors") {
  CHECK_THROWS_AS(fit_variogram(white_field_samples(2, 1.0, 5)), Error);
  std::vector<PointValue> colocated;
  for (int i = 0; i < 8; ++i) colocated.push_back({{100.0, 200.0}, 1.0 * i});
  CHECK_THROWS_AS(fit_variogram(colocated), Error);
}

TEST_CASE("smooth field prefers a structured model over pure nugget") {
  // Values follow a smooth deterministic surface; the fitted partial sill
  // should dominate the nugget.
  std::vector<PointValue> samples;
  Rng rng(88);
  for (int i = 0; i < 120; ++i) {
    const double x = rng.uniform() * 40000.0;
    const double y = rng.uniform() * 40000.0;
    samples.push_back({{x, y}, std::sin(x / 9000.0) + std::cos(y / 11000.0)});
  }
  const VariogramModel m = fit_variogram(samples);
  CHECK(m.sill - m.nugget > m.nugget);
}
