#include "aeromix/window.hpp"

#include <cmath>
#include <string>

#include "aeromix/error.hpp"

namespace aeromix {

namespace fusion {

double quality_weight(const int* codes, std::size_t n) {
  int best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (codes[i] < 0 || codes[i] > 3) {
      fail(ErrorClass::ValidationError,
           "qa code " + std::to_string(codes[i]) + " outside 0..3");
    }
    if (codes[i] == 3) ++best;
  }
  return static_cast<double>(best) / 9.0;
}

}  // namespace fusion

WindowSample extract_window(const AODGrid& grid, const Location& location,
                            double std_threshold) {
  if (!grid.geom.contains(location)) {
    fail(ErrorClass::ValidationError,
         "window location (" + std::to_string(location.east) + ", " +
             std::to_string(location.north) + ") outside grid bounds");
  }
  int r0 = 0, c0 = 0;
  grid.geom.cell_of(location, r0, c0);

  WindowSample sample;
  sample.sensor = grid.sensor;
  sample.algorithm = grid.algorithm;
  sample.date = grid.date;
  sample.location = location;

  double sum = 0.0;
  double sum_sq = 0.0;
  int n = 0;
  int best = 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const int r = r0 + dr;
      const int c = c0 + dc;
      if (r < 0 || r >= grid.geom.nrows || c < 0 || c >= grid.geom.ncols) continue;
      if (!grid.valid(r, c)) continue;
      const double v = grid.value(r, c);
      sum += v;
      sum_sq += v * v;
      ++n;
      if (grid.qa_code(r, c) == 3) ++best;
    }
  }

  sample.n_valid = n;
  sample.weight = static_cast<double>(best) / 9.0;
  if (n > 0) {
    sample.mean_aod = sum / n;
    const double var = std::max(0.0, sum_sq / n - sample.mean_aod * sample.mean_aod);
    sample.std_aod = std::sqrt(var);
    sample.valid = sample.std_aod <= std_threshold;
  }
  return sample;
}

}  // namespace aeromix
