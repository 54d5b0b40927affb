#pragma once

#include <string>
#include <vector>

#include "aeromix/geo.hpp"

namespace aeromix {

struct PointValue {
  Location location;
  double value = 0.0;
};

enum class VariogramKind { Spherical, Exponential, Gaussian };

const char* to_string(VariogramKind k);
VariogramKind variogram_kind_from_string(const std::string& s);

// Isotropic semivariogram. semivariance(0) = nugget; the curve rises
// monotonically to the sill, reaching it at (or asymptotically near) the
// range. Exponential and gaussian use the practical-range convention
// (95% of the partial sill at the stated range).
struct VariogramModel {
  VariogramKind kind = VariogramKind::Spherical;
  double nugget = 0.0;
  double sill = 0.0;   // nugget + partial sill
  double range = 1.0;  // > 0

  double semivariance(double lag) const;
};

struct VariogramBin {
  double lag = 0.0;  // bin center
  double gamma = 0.0;
  std::size_t n_pairs = 0;
};

// Bin-averaged squared half-differences against lag, over equal-width bins
// up to half the maximum pairwise distance. Zero-lag pairs are skipped.
std::vector<VariogramBin> empirical_variogram(const std::vector<PointValue>& samples,
                                              int n_bins = 12);

// Fits nugget/sill/range per candidate kind by least squares on the
// empirical semivariogram (range scanned over a fixed grid, nugget and
// partial sill solved in closed form, both clamped nonnegative), then keeps
// the kind with the lowest leave-one-out kriging RMSE. Requires >= 5 samples
// at >= 3 distinct locations.
VariogramModel fit_variogram(
    const std::vector<PointValue>& samples,
    const std::vector<VariogramKind>& kinds = {VariogramKind::Spherical,
                                               VariogramKind::Exponential,
                                               VariogramKind::Gaussian});

}  // namespace aeromix
