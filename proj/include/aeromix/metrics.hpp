#pragma once

#include <cstddef>
#include <span>

namespace aeromix {

// Accuracy summary. r2 is NaN when the true values are constant (zero total
// sum of squares); rmse >= mae always holds.
struct Metrics {
  double r2 = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t n = 0;
};

Metrics compute_metrics(std::span<const double> y_true, std::span<const double> y_pred);

}  // namespace aeromix
