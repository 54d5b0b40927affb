#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aeromix/date.hpp"
#include "aeromix/fusion.hpp"
#include "aeromix/geo.hpp"
#include "aeromix/tables.hpp"
#include "aeromix/variogram.hpp"

namespace aeromix {

inline constexpr double kDefaultIdwPower = 2.0;
inline constexpr double kIdwCoincidenceMeters = 1e-9;

// A grid location whose PM2.5 comes from the fusion model rather than a
// ground instrument.
struct QuasiStation {
  Location location;
  Date date;
  double pm25_estimate = 0.0;
  std::string source;  // fusion model id, e.g. "scenario-1"
};

struct PM25Map {
  GridGeometry geom;
  Date date;
  std::vector<double> values;
  std::size_t n_ground = 0;
  std::size_t n_quasi = 0;
};

// Everything the fusion model needs at one grid cell: normalized daily AOD
// per available product plus interpolated met covariates.
struct CellFeatures {
  int row = 0;
  int col = 0;
  Location center;
  std::map<ProductId, double> aod;
  MetRecord met;
};

// One quasi-station per covered cell (a cell is covered when at least one
// scenario product is available there), estimated through the stacking
// combiner for the available subset. stride > 1 keeps every stride-th row
// and column.
std::vector<QuasiStation> generate_quasi_stations(const DecisionFusionModel& model,
                                                  const std::vector<CellFeatures>& cells,
                                                  const Date& date,
                                                  int thinning_stride = 1);

// Inverse-distance weighting with weights d^(-power); a cell closer than the
// coincidence threshold to an input point takes that point's value directly.
PM25Map idw_interpolate(const std::vector<PointValue>& points,
                        const GridGeometry& geom, const Date& date,
                        double power = kDefaultIdwPower);

// AGF-style text grid without sensor/algorithm/QA, for PM2.5 surfaces.
void write_pm25_map(const PM25Map& map, const std::string& path);

struct Palette {
  double vmin = 0.0;
  double vmax = 100.0;
  std::vector<std::array<std::uint8_t, 3>> stops;  // low to high

  static Palette standard(double vmin, double vmax);
  std::array<std::uint8_t, 3> color(double value) const;
};

struct RenderStats {
  std::size_t clipped_low = 0;
  std::size_t clipped_high = 0;
};

// Deterministic binary PPM plus a world-georeference sidecar (.wld) and a
// render log that flags palette clipping. Same map, same bytes.
RenderStats render_map(const PM25Map& map, const Palette& palette,
                       const std::string& image_path);

}  // namespace aeromix
