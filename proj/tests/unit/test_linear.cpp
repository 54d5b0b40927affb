#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "aeromix/error.hpp"
#include "aeromix/linear.hpp"
#include "aeromix/rng.hpp"

using namespace aeromix;

namespace {

// Independent minimum-norm least-squares oracle: SVD pseudo-inverse of the
// bias-augmented design matrix.
double pinv_sse(const std::vector<double>& x, std::size_t n, std::size_t p,
                const std::vector<double>& y) {
  Eigen::MatrixXd a(n, p + 1);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i * p + j];
    }
    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = 1.0;
    b(static_cast<Eigen::Index>(i)) = y[i];
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd beta = svd.solve(b);
  return (a * beta - b).squaredNorm();
}

double model_sse(const LinearModel& model, const std::vector<double>& x, std::size_t n,
                 std::size_t p, const std::vector<double>& y) {
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = predict(model, std::span<const double>(x.data() + i * p, p));
    sse += (pred - y[i]) * (pred - y[i]);
  }
  return sse;
}

}  // namespace

TEST_CASE("exact line y = 2x + 1") {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(0.5 * i);
    y.push_back(2.0 * x.back() + 1.0);
  }
  const LinearModel m = fit_linear(x, x.size(), 1, y);
  CHECK(m.coefficients[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(m.bias == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("constant target gives zero coefficients and bias c") {
  std::vector<double> x, y;
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    x.push_back(rng.normal());
    y.push_back(4.25);
  }
  const LinearModel m = fit_linear(x, x.size(), 1, y);
  CHECK(m.coefficients[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(m.bias == doctest::Approx(4.25).epsilon(1e-12));
}

TEST_CASE("duplicated feature column matches the pseudo-inverse SSE") {
  Rng rng(555);
  const std::size_t n = 60;
  std::vector<double> x(n * 3), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = rng.normal();
    x[i * 3 + 0] = v;
    x[i * 3 + 1] = v;  // exact duplicate
    x[i * 3 + 2] = rng.normal();
    y[i] = 3.0 * v - 1.0 * x[i * 3 + 2] + 0.5 + 0.1 * rng.normal();
  }
  const LinearModel m = fit_linear(x, n, 3, y);
  for (double c : m.coefficients) CHECK(std::isfinite(c));
  const double sse = model_sse(m, x, n, 3, y);
  const double oracle = pinv_sse(x, n, 3, y);
  CHECK(sse == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("random instances match the oracle SSE within 1e-8 relative") {
  Rng rng(808);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 20 + rng.bounded(40);
    const std::size_t p = 1 + rng.bounded(5);
    std::vector<double> x(n * p), y(n);
    std::vector<double> beta(p);
    for (auto& b : beta) b = rng.normal();
    const bool deficient = trial % 3 == 0 && p >= 2;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) x[i * p + j] = rng.normal();
      if (deficient) x[i * p + 1] = 2.0 * x[i * p] - 0.5 * x[i * p + (p - 1)];
      double v = 0.3;
      for (std::size_t j = 0; j < p; ++j) v += beta[j] * x[i * p + j];
      y[i] = v + 0.2 * rng.normal();
    }
    const LinearModel m = fit_linear(x, n, p, y);
    const double sse = model_sse(m, x, n, p, y);
    const double oracle = pinv_sse(x, n, p, y);
    CHECK(std::abs(sse - oracle) <= 1e-8 * std::max(1.0, oracle));
  }
}

TEST_CASE("needs n >= arity + 1") {
  const std::vector<double> x = {1.0, 2.0};
  const std::vector<double> y = {1.0};
  CHECK_THROWS_AS(fit_linear(x, 1, 2, y), Error);
}

TEST_CASE("predict validates arity") {
  LinearModel m;
  m.coefficients = {2.0};
  m.bias = 1.0;
  const std::vector<double> features = {3.0};
  CHECK(predict(m, features) == doctest::Approx(7.0));
  const std::vector<double> wrong = {3.0, 4.0};
  CHECK_THROWS_AS(predict(m, wrong), Error);
}
