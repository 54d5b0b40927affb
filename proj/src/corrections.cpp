#include "aeromix/corrections.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aeromix/error.hpp"

namespace aeromix {

double correct_pm25(double pm, double rh, double rh_max) {
  if (!(pm >= 0.0) || !std::isfinite(pm)) {
    fail(ErrorClass::ValidationError, "pm25 must be finite and >= 0, got " + std::to_string(pm));
  }
  if (!(rh >= 0.0 && rh <= 100.0)) {
    fail(ErrorClass::ValidationError, "rh must lie in [0, 100], got " + std::to_string(rh));
  }
  const double clamped = std::min(rh, rh_max);
  return pm / (1.0 - clamped / 100.0);
}

double normalize_aod(double aod, double blh, double blh_min) {
  return aod / std::max(blh, blh_min);
}

}  // namespace aeromix
