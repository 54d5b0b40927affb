#include <doctest.h>

#include <cmath>

#include "aeromix/error.hpp"
#include "aeromix/metrics.hpp"
#include "aeromix/rng.hpp"

using namespace aeromix;

TEST_CASE("perfect prediction") {
  const std::vector<double> y = {1.0, 2.0, 3.0, 4.0};
  const Metrics m = compute_metrics(y, y);
  CHECK(m.r2 == doctest::Approx(1.0));
  CHECK(m.rmse == doctest::Approx(0.0));
  CHECK(m.mae == doctest::Approx(0.0));
  CHECK(m.n == 4);
}

TEST_CASE("mean predictor scores r2 = 0") {
  const std::vector<double> y = {2.0, 4.0, 6.0, 8.0};
  const std::vector<double> pred(4, 5.0);
  const Metrics m = compute_metrics(y, pred);
  CHECK(m.r2 == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("hand-computed case: errors (0,0,0,8)") {
  // SSE = 64, MSE = 16, SST about mean 5 is 100.
  const std::vector<double> y_true = {0.0, 0.0, 10.0, 10.0};
  const std::vector<double> y_pred = {0.0, 0.0, 10.0, 2.0};
  const Metrics m = compute_metrics(y_true, y_pred);
  CHECK(m.mae == doctest::Approx(2.0));
  CHECK(m.rmse == doctest::Approx(4.0));
  CHECK(m.r2 == doctest::Approx(1.0 - 64.0 / 100.0));
}

TEST_CASE("constant truth flags r2 as NaN") {
  const std::vector<double> y(5, 3.0);
  const std::vector<double> pred = {3.0, 3.1, 2.9, 3.0, 3.2};
  const Metrics m = compute_metrics(y, pred);
  CHECK(std::isnan(m.r2));
  CHECK(m.rmse > 0.0);
}

TEST_CASE("rmse >= mae on random evaluations") {
  Rng rng(246);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> y, pred;
    const std::size_t n = 2 + rng.bounded(50);
    for (std::size_t i = 0; i < n; ++i) {
      y.push_back(rng.normal() * 10.0);
      pred.push_back(y.back() + rng.normal() * 3.0);
    }
    const Metrics m = compute_metrics(y, pred);
    CHECK(m.rmse >= m.mae - 1e-12);
    CHECK(m.mae >= 0.0);
    CHECK(m.r2 <= 1.0 + 1e-12);
  }
}

TEST_CASE("length mismatch and empty input are errors") {
  const std::vector<double> a = {1.0, 2.0};
  const std::vector<double> b = {1.0};
  CHECK_THROWS_AS(compute_metrics(a, b), Error);
  CHECK_THROWS_AS(compute_metrics(std::vector<double>{}, std::vector<double>{}), Error);
}
