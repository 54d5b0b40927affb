#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace aeromix {

inline constexpr int kMinCrossFillPairs = 30;

// Linear regression of one platform's AOD on the other, used to estimate a
// missing platform value from the available one.
struct CrossFillRegression {
  double slope = 0.0;
  double intercept = 0.0;
  int n_pairs = 0;
  double r = 0.0;  // correlation coefficient, [-1, 1]
};

// Ordinary least squares of b on a over paired samples. Throws
// insufficient-data below min_pairs and degenerate-geometry when the
// predictor has zero variance.
CrossFillRegression fit_cross_fill(const std::vector<double>& a,
                                   const std::vector<double>& b,
                                   int min_pairs = kMinCrossFillPairs);

// Predicted AOD, clamped at zero.
double apply_cross_fill(const CrossFillRegression& reg, double a_value);

// Daily value from the two platforms of one sensor: the mean of both when
// both are present, otherwise the mean of the present value and its
// regression-filled counterpart. Returns nullopt when neither value is
// present or the needed regression is unavailable.
std::optional<double> daily_average(
    std::optional<double> aod_a, std::optional<double> aod_b,
    const std::optional<CrossFillRegression>& reg_a_to_b,
    const std::optional<CrossFillRegression>& reg_b_to_a);

}  // namespace aeromix
