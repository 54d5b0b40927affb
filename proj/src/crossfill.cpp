#include "aeromix/crossfill.hpp"

#include <cmath>
#include <string>

#include "aeromix/error.hpp"

namespace aeromix {

CrossFillRegression fit_cross_fill(const std::vector<double>& a,
                                   const std::vector<double>& b, int min_pairs) {
  if (a.size() != b.size()) {
    fail(ErrorClass::ValidationError, "cross-fill series length mismatch");
  }
  const std::size_t n = a.size();
  if (n < static_cast<std::size_t>(min_pairs)) {
    fail(ErrorClass::InsufficientData,
         "cross-fill needs >= " + std::to_string(min_pairs) + " paired samples, got " +
             std::to_string(n));
  }

  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);

  double s_aa = 0.0, s_bb = 0.0, s_ab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    s_aa += da * da;
    s_bb += db * db;
    s_ab += da * db;
  }
  if (s_aa <= 0.0) {
    fail(ErrorClass::DegenerateGeometry,
         "cross-fill predictor series is constant; no regression possible");
  }

  CrossFillRegression reg;
  reg.slope = s_ab / s_aa;
  reg.intercept = mean_b - reg.slope * mean_a;
  reg.n_pairs = static_cast<int>(n);
  reg.r = s_bb > 0.0 ? s_ab / std::sqrt(s_aa * s_bb) : 0.0;
  if (reg.r > 1.0) reg.r = 1.0;
  if (reg.r < -1.0) reg.r = -1.0;
  return reg;
}

double apply_cross_fill(const CrossFillRegression& reg, double a_value) {
  return std::max(0.0, reg.slope * a_value + reg.intercept);
}

std::optional<double> daily_average(
    std::optional<double> aod_a, std::optional<double> aod_b,
    const std::optional<CrossFillRegression>& reg_a_to_b,
    const std::optional<CrossFillRegression>& reg_b_to_a) {
  if (aod_a && aod_b) return 0.5 * (*aod_a + *aod_b);
  if (aod_a) {
    if (!reg_a_to_b) return std::nullopt;
    return 0.5 * (*aod_a + apply_cross_fill(*reg_a_to_b, *aod_a));
  }
  if (aod_b) {
    if (!reg_b_to_a) return std::nullopt;
    return 0.5 * (*aod_b + apply_cross_fill(*reg_b_to_a, *aod_b));
  }
  return std::nullopt;
}

}  // namespace aeromix
