#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aeromix/training.hpp"

namespace aeromix {

struct LinearModel {
  std::vector<double> coefficients;
  double bias = 0.0;
};

// Least squares with an intercept. Columns are standardized internally and
// the normal equations solved by LDLT; on rank deficiency the diagonal is
// regularized by 1e-8 (relative to its mean), which selects the minimum-norm
// solution among the ties. Requires n >= arity + 1.
LinearModel fit_linear(std::span<const double> x_rowmajor, std::size_t n_rows,
                       std::size_t arity, std::span<const double> y);
LinearModel fit_linear(const TrainingMatrix& matrix);

double predict(const LinearModel& model, std::span<const double> features);

}  // namespace aeromix
