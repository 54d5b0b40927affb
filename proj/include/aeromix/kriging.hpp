#pragma once

#include <memory>
#include <vector>

#include "aeromix/geo.hpp"
#include "aeromix/variogram.hpp"

namespace aeromix {

// Ordinary kriging interpolator. The (n+1)x(n+1) system with the Lagrange
// multiplier row is factorized once, so predicting at many targets reuses
// the decomposition. Weights always sum to 1. A model with sill 0 describes
// a constant field; prediction then falls back to equal weights.
class OrdinaryKriging {
 public:
  OrdinaryKriging(std::vector<PointValue> samples, VariogramModel model);
  ~OrdinaryKriging();
  OrdinaryKriging(OrdinaryKriging&&) noexcept;
  OrdinaryKriging& operator=(OrdinaryKriging&&) noexcept;

  double predict(const Location& target) const;
  std::vector<double> weights(const Location& target) const;
  const std::vector<PointValue>& samples() const { return samples_; }

 private:
  struct Impl;
  std::vector<PointValue> samples_;
  VariogramModel model_;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper.
double krige(const std::vector<PointValue>& samples, const VariogramModel& model,
             const Location& target);

}  // namespace aeromix
