#pragma once

namespace aeromix {

inline constexpr double kDefaultRhMax = 99.0;
inline constexpr double kDefaultBlhMin = 50.0;  // meters

// Hygroscopic growth correction for dry-mass PM2.5 readings:
// pm / (1 - rh/100), with rh clamped to rh_max to keep the factor finite.
// Throws validation-error for negative pm or rh outside [0, 100].
double correct_pm25(double pm, double rh, double rh_max = kDefaultRhMax);

// Column AOD scaled to a surface-relevant quantity by the boundary layer
// height; blh is floored at blh_min before dividing.
double normalize_aod(double aod, double blh, double blh_min = kDefaultBlhMin);

}  // namespace aeromix
