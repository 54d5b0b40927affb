#pragma once

#include <utility>

#include "aeromix/aod_grid.hpp"
#include "aeromix/date.hpp"
#include "aeromix/geo.hpp"

namespace aeromix {

inline constexpr double kDefaultStdThreshold = 0.02;

// AOD extracted from the 3x3 pixel window centered on the pixel containing a
// target location. The sample is unreliable (valid = false) when the window
// holds no valid pixel or when the spread across its valid pixels exceeds
// the threshold; the quality weight is reported either way.
struct WindowSample {
  Sensor sensor = Sensor::ModisTerra;
  Algorithm algorithm = Algorithm::DeepBlue;
  Date date;
  Location location;
  double mean_aod = 0.0;
  double std_aod = 0.0;   // population standard deviation over valid pixels
  double weight = 0.0;    // (# best-quality pixels in window) / 9
  int n_valid = 0;        // 0..9
  bool valid = false;
};

// Windows at grid edges use the available pixels; the weight denominator
// stays 9. Throws validation-error if the location is outside the grid.
WindowSample extract_window(const AODGrid& grid, const Location& location,
                            double std_threshold = kDefaultStdThreshold);

namespace fusion {

// Fraction of best-quality retrievals in a 3x3 window: (# codes == 3) / 9.
// Missing pixels count as non-best. Inputs outside 0..3 are rejected.
double quality_weight(const int* codes, std::size_t n);

}  // namespace fusion

}  // namespace aeromix
