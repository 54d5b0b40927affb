#include "aeromix/mapgen.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "aeromix/error.hpp"
#include "aeromix/strings.hpp"
#include "aeromix/training.hpp"

namespace aeromix {

std::vector<QuasiStation> generate_quasi_stations(const DecisionFusionModel& model,
                                                  const std::vector<CellFeatures>& cells,
                                                  const Date& date,
                                                  int thinning_stride) {
  if (thinning_stride < 1) {
    fail(ErrorClass::ValidationError, "thinning stride must be >= 1");
  }
  std::vector<QuasiStation> out;
  std::vector<double> features;
  const std::string source = "scenario-" + std::to_string(model.scenario_id);
  for (const CellFeatures& cell : cells) {
    if (cell.row % thinning_stride != 0 || cell.col % thinning_stride != 0) continue;

    std::map<ProductId, double> decisions;
    for (ProductId p : model.products) {
      const auto it = cell.aod.find(p);
      if (it == cell.aod.end()) continue;
      features.clear();
      features.push_back(it->second);
      features.push_back(cell.center.east);
      features.push_back(cell.center.north);
      for (std::size_t v = 0; v < MetRecord::kNumVars; ++v) {
        features.push_back(cell.met.var(v));
      }
      features.push_back(static_cast<double>(date.day_of_year()));
      decisions[p] = model.base_models.at(p).predict(features);
    }
    const std::optional<double> estimate = model.predict_subset(decisions);
    if (!estimate) continue;
    out.push_back(QuasiStation{cell.center, date, *estimate, source});
  }
  return out;
}

PM25Map idw_interpolate(const std::vector<PointValue>& points,
                        const GridGeometry& geom, const Date& date, double power) {
  if (points.empty()) {
    fail(ErrorClass::ValidationError, "idw needs at least one input point");
  }
  if (!(power > 0.0)) {
    fail(ErrorClass::ValidationError, "idw power must be positive");
  }

  // Exact duplicates would double their own weight; keep one of each.
  std::vector<PointValue> unique_points;
  {
    std::set<std::tuple<double, double, double>> seen;
    unique_points.reserve(points.size());
    for (const PointValue& p : points) {
      if (seen.insert({p.location.east, p.location.north, p.value}).second) {
        unique_points.push_back(p);
      }
    }
  }

  PM25Map map;
  map.geom = geom;
  map.date = date;
  map.values.assign(geom.size(), 0.0);

  for (int r = 0; r < geom.nrows; ++r) {
    for (int c = 0; c < geom.ncols; ++c) {
      const Location x = geom.cell_center(r, c);
      double numerator = 0.0;
      double denominator = 0.0;
      double value = 0.0;
      bool coincident = false;
      for (const PointValue& p : unique_points) {
        const double d = distance(p.location, x);
        if (d < kIdwCoincidenceMeters) {
          value = p.value;
          coincident = true;
          break;
        }
        const double w = std::pow(d, -power);
        numerator += w * p.value;
        denominator += w;
      }
      map.values[geom.index(r, c)] = coincident ? value : numerator / denominator;
    }
  }
  return map;
}

void write_pm25_map(const PM25Map& map, const std::string& path) {
  std::ostringstream out;
  out << "ncols = " << map.geom.ncols << "\n";
  out << "nrows = " << map.geom.nrows << "\n";
  out << "xllcorner = " << format_g(map.geom.origin_east, 17) << "\n";
  out << "yllcorner = " << format_g(map.geom.origin_north, 17) << "\n";
  out << "cellsize = " << format_g(map.geom.cellsize, 17) << "\n";
  out << "nodata_value = " << format_float(map.geom.nodata) << "\n";
  out << "date = " << map.date.to_string() << "\n";
  out << "VALUES\n";
  for (int r = 0; r < map.geom.nrows; ++r) {
    for (int c = 0; c < map.geom.ncols; ++c) {
      if (c) out << ' ';
      out << format_g(map.values[map.geom.index(r, c)], 9);
    }
    out << "\n";
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorClass::IoError, "cannot write map file " + path);
  f << out.str();
}

Palette Palette::standard(double vmin, double vmax) {
  Palette p;
  p.vmin = vmin;
  p.vmax = vmax;
  p.stops = {{0, 0, 255}, {0, 255, 255}, {0, 255, 0}, {255, 255, 0}, {255, 0, 0}};
  return p;
}

std::array<std::uint8_t, 3> Palette::color(double value) const {
  double t = (value - vmin) / (vmax - vmin);
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  const double pos = t * static_cast<double>(stops.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = lo + 1 < stops.size() ? lo + 1 : lo;
  const double frac = pos - static_cast<double>(lo);
  std::array<std::uint8_t, 3> rgb{};
  for (std::size_t k = 0; k < 3; ++k) {
    const double mixed = (1.0 - frac) * stops[lo][k] + frac * stops[hi][k];
    rgb[k] = static_cast<std::uint8_t>(std::lround(mixed));
  }
  return rgb;
}

RenderStats render_map(const PM25Map& map, const Palette& palette,
                       const std::string& image_path) {
  if (palette.stops.size() < 2 || !(palette.vmax > palette.vmin)) {
    fail(ErrorClass::ValidationError, "palette needs vmax > vmin and >= 2 stops");
  }
  RenderStats stats;
  std::string pixels;
  pixels.reserve(map.geom.size() * 3);
  for (int r = 0; r < map.geom.nrows; ++r) {
    for (int c = 0; c < map.geom.ncols; ++c) {
      const double v = map.values[map.geom.index(r, c)];
      if (v < palette.vmin) ++stats.clipped_low;
      if (v > palette.vmax) ++stats.clipped_high;
      const auto rgb = palette.color(v);
      pixels.push_back(static_cast<char>(rgb[0]));
      pixels.push_back(static_cast<char>(rgb[1]));
      pixels.push_back(static_cast<char>(rgb[2]));
    }
  }

  std::ofstream img(image_path, std::ios::binary | std::ios::trunc);
  if (!img) fail(ErrorClass::IoError, "cannot write image " + image_path);
  img << "P6\n" << map.geom.ncols << " " << map.geom.nrows << "\n255\n" << pixels;
  if (!img) fail(ErrorClass::IoError, "image write failed: " + image_path);
  img.close();

  // World file: pixel size, rotation terms, center of the upper-left pixel.
  const Location ul = map.geom.cell_center(0, 0);
  std::ostringstream world;
  world << format_g(map.geom.cellsize, 9) << "\n0\n0\n"
        << format_g(-map.geom.cellsize, 9) << "\n"
        << format_g(ul.east, 9) << "\n"
        << format_g(ul.north, 9) << "\n";
  std::ofstream wld(image_path + ".wld", std::ios::binary | std::ios::trunc);
  if (!wld) fail(ErrorClass::IoError, "cannot write world file for " + image_path);
  wld << world.str();

  std::ostringstream log;
  log << "image = " << image_path << "\n";
  log << "size = " << map.geom.ncols << "x" << map.geom.nrows << "\n";
  log << "vmin = " << format_g(palette.vmin, 9) << "\n";
  log << "vmax = " << format_g(palette.vmax, 9) << "\n";
  log << "clipped_low = " << stats.clipped_low << "\n";
  log << "clipped_high = " << stats.clipped_high << "\n";
  std::ofstream lg(image_path + ".log", std::ios::binary | std::ios::trunc);
  if (!lg) fail(ErrorClass::IoError, "cannot write render log for " + image_path);
  lg << log.str();
  return stats;
}

}  // namespace aeromix
