#include "aeromix/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "aeromix/error.hpp"

namespace aeromix {

Metrics compute_metrics(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) {
    fail(ErrorClass::ValidationError,
         "metrics length mismatch: " + std::to_string(y_true.size()) + " vs " +
             std::to_string(y_pred.size()));
  }
  if (y_true.empty()) {
    fail(ErrorClass::ValidationError, "metrics need at least one sample");
  }

  const auto n = static_cast<double>(y_true.size());
  double mean_true = 0.0;
  for (double v : y_true) mean_true += v;
  mean_true /= n;

  double sse = 0.0, abs_err = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double err = y_true[i] - y_pred[i];
    sse += err * err;
    abs_err += std::abs(err);
    const double dev = y_true[i] - mean_true;
    sst += dev * dev;
  }

  Metrics m;
  m.n = y_true.size();
  m.rmse = std::sqrt(sse / n);
  m.mae = abs_err / n;
  m.r2 = sst > 0.0 ? 1.0 - sse / sst : std::numeric_limits<double>::quiet_NaN();
  return m;
}

}  // namespace aeromix
