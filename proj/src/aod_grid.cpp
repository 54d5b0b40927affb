#include "aeromix/aod_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "aeromix/error.hpp"
#include "aeromix/strings.hpp"

namespace aeromix {

const char* to_string(Sensor s) {
  switch (s) {
    case Sensor::ModisTerra: return "MODIS-Terra";
    case Sensor::ModisAqua: return "MODIS-Aqua";
    case Sensor::ViirsSnpp: return "VIIRS-SNPP";
  }
  return "?";
}

const char* to_string(Algorithm a) {
  return a == Algorithm::DeepBlue ? "DB" : "DT";
}

Sensor sensor_from_string(const std::string& s) {
  if (s == "MODIS-Terra") return Sensor::ModisTerra;
  if (s == "MODIS-Aqua") return Sensor::ModisAqua;
  if (s == "VIIRS-SNPP") return Sensor::ViirsSnpp;
  fail(ErrorClass::ParseError, "unknown sensor '" + s + "'");
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "DB") return Algorithm::DeepBlue;
  if (s == "DT") return Algorithm::DarkTarget;
  fail(ErrorClass::ParseError, "unknown algorithm '" + s + "'");
}

const char* file_token(Sensor s) {
  switch (s) {
    case Sensor::ModisTerra: return "terra";
    case Sensor::ModisAqua: return "aqua";
    case Sensor::ViirsSnpp: return "snpp";
  }
  return "?";
}

const char* file_token(Algorithm a) {
  return a == Algorithm::DeepBlue ? "db" : "dt";
}

void AODGrid::validate() const {
  if (geom.nrows <= 0 || geom.ncols <= 0) {
    fail(ErrorClass::ValidationError, "grid dimensions must be positive");
  }
  if (geom.cellsize <= 0) {
    fail(ErrorClass::ValidationError, "cellsize must be positive");
  }
  if (values.size() != geom.size() || qa.size() != geom.size()) {
    fail(ErrorClass::ValidationError,
         "values/qa size mismatch: expected " + std::to_string(geom.size()) +
             ", got " + std::to_string(values.size()) + "/" +
             std::to_string(qa.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (qa[i] > 3) {
      fail(ErrorClass::ValidationError,
           "qa code out of range 0..3 at pixel " + std::to_string(i));
    }
    const float v = values[i];
    if (v == geom.nodata) continue;
    if (!std::isfinite(v) || v < 0.0f) {
      fail(ErrorClass::ValidationError,
           "invalid AOD value " + format_float(v) + " at pixel " + std::to_string(i));
    }
  }
}

namespace {

struct LineReader {
  std::ifstream in;
  std::string path;
  std::size_t line_no = 0;

  bool next(std::string& line) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  [[noreturn]] void fail_here(const std::string& msg) const {
    fail(ErrorClass::ParseError, path + ":" + std::to_string(line_no) + ": " + msg);
  }
};

}  // namespace

AODGrid load_grid(const std::string& path) {
  LineReader reader;
  reader.in.open(path);
  reader.path = path;
  if (!reader.in) {
    fail(std::filesystem::exists(path) ? ErrorClass::IoError : ErrorClass::InputMissing,
         "cannot open grid file " + path);
  }

  std::map<std::string, std::string> header;
  std::string line;
  while (true) {
    if (!reader.next(line)) reader.fail_here("unexpected end of file before VALUES");
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t == "VALUES") break;
    const auto eq = t.find('=');
    if (eq == std::string::npos) reader.fail_here("expected 'key = value', got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (header.count(key)) reader.fail_here("duplicate header key '" + key + "'");
    header[key] = value;
  }

  auto need = [&](const char* key) -> std::string {
    auto it = header.find(key);
    if (it == header.end()) {
      fail(ErrorClass::ParseError, path + ": missing header field '" + std::string(key) + "'");
    }
    return it->second;
  };

  AODGrid grid;
  grid.geom.ncols = static_cast<int>(parse_long(need("ncols"), "ncols"));
  grid.geom.nrows = static_cast<int>(parse_long(need("nrows"), "nrows"));
  grid.geom.origin_east = parse_double(need("xllcorner"), "xllcorner");
  grid.geom.origin_north = parse_double(need("yllcorner"), "yllcorner");
  grid.geom.cellsize = parse_double(need("cellsize"), "cellsize");
  grid.geom.nodata = parse_float(need("nodata_value"), "nodata_value");
  grid.sensor = sensor_from_string(need("sensor"));
  grid.algorithm = algorithm_from_string(need("algorithm"));
  grid.date = Date::parse(need("date"));
  if (grid.geom.nrows <= 0 || grid.geom.ncols <= 0) {
    fail(ErrorClass::ParseError, path + ": nrows/ncols must be positive");
  }

  grid.values.reserve(grid.geom.size());
  for (int r = 0; r < grid.geom.nrows; ++r) {
    if (!reader.next(line)) reader.fail_here("VALUES block ended early");
    const auto fields = split(trim(line), ' ');
    std::size_t n = 0;
    for (const auto& f : fields) {
      if (f.empty()) continue;
      grid.values.push_back(parse_float(f, "VALUES row " + std::to_string(r)));
      ++n;
    }
    if (n != static_cast<std::size_t>(grid.geom.ncols)) {
      reader.fail_here("VALUES row " + std::to_string(r) + " has " + std::to_string(n) +
                       " columns, expected " + std::to_string(grid.geom.ncols));
    }
  }

  if (!reader.next(line) || trim(line) != "QA") {
    reader.fail_here("expected QA block after " + std::to_string(grid.geom.nrows) +
                     " value rows");
  }
  grid.qa.reserve(grid.geom.size());
  for (int r = 0; r < grid.geom.nrows; ++r) {
    if (!reader.next(line)) reader.fail_here("QA block ended early");
    const auto fields = split(trim(line), ' ');
    std::size_t n = 0;
    for (const auto& f : fields) {
      if (f.empty()) continue;
      const long q = parse_long(f, "QA row " + std::to_string(r));
      if (q < 0 || q > 3) {
        reader.fail_here("qa code " + std::to_string(q) + " outside 0..3 in row " +
                         std::to_string(r));
      }
      grid.qa.push_back(static_cast<std::uint8_t>(q));
      ++n;
    }
    if (n != static_cast<std::size_t>(grid.geom.ncols)) {
      reader.fail_here("QA row " + std::to_string(r) + " has " + std::to_string(n) +
                       " columns, expected " + std::to_string(grid.geom.ncols));
    }
  }
  while (reader.next(line)) {
    if (!trim(line).empty()) {
      reader.fail_here("trailing content after QA block (dimension mismatch?)");
    }
  }

  try {
    grid.validate();
  } catch (const Error& e) {
    fail(ErrorClass::ParseError, path + ": " + e.what());
  }
  return grid;
}

void write_grid(const AODGrid& grid, const std::string& path) {
  grid.validate();
  std::ostringstream out;
  out << "ncols = " << grid.geom.ncols << "\n";
  out << "nrows = " << grid.geom.nrows << "\n";
  out << "xllcorner = " << format_g(grid.geom.origin_east, 17) << "\n";
  out << "yllcorner = " << format_g(grid.geom.origin_north, 17) << "\n";
  out << "cellsize = " << format_g(grid.geom.cellsize, 17) << "\n";
  out << "nodata_value = " << format_float(grid.geom.nodata) << "\n";
  out << "sensor = " << to_string(grid.sensor) << "\n";
  out << "algorithm = " << to_string(grid.algorithm) << "\n";
  out << "date = " << grid.date.to_string() << "\n";
  out << "VALUES\n";
  for (int r = 0; r < grid.geom.nrows; ++r) {
    for (int c = 0; c < grid.geom.ncols; ++c) {
      if (c) out << ' ';
      out << format_float(grid.value(r, c));
    }
    out << "\n";
  }
  out << "QA\n";
  for (int r = 0; r < grid.geom.nrows; ++r) {
    for (int c = 0; c < grid.geom.ncols; ++c) {
      if (c) out << ' ';
      out << static_cast<int>(grid.qa_code(r, c));
    }
    out << "\n";
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorClass::IoError, "cannot write grid file " + path);
  f << out.str();
  if (!f) fail(ErrorClass::IoError, "write failed: " + path);
}

AODGrid merge_swaths(const std::vector<AODGrid>& grids) {
  if (grids.empty()) {
    fail(ErrorClass::ValidationError, "merge_swaths: no input grids");
  }
  const AODGrid& first = grids.front();
  for (const AODGrid& g : grids) {
    g.validate();
    if (!g.geom.same_shape(first.geom) || g.sensor != first.sensor ||
        g.algorithm != first.algorithm || g.date != first.date) {
      fail(ErrorClass::ValidationError,
           "merge_swaths: geometry or provenance mismatch between swaths");
    }
  }

  AODGrid out;
  out.geom = first.geom;
  out.sensor = first.sensor;
  out.algorithm = first.algorithm;
  out.date = first.date;
  out.values.assign(out.geom.size(), out.geom.nodata);
  out.qa.assign(out.geom.size(), 0);

  std::vector<float> contributions;
  for (std::size_t i = 0; i < out.geom.size(); ++i) {
    contributions.clear();
    std::uint8_t best_qa = 0;
    for (const AODGrid& g : grids) {
      const float v = g.values[i];
      if (v == g.geom.nodata) continue;
      contributions.push_back(v);
      best_qa = std::max(best_qa, g.qa[i]);
    }
    if (contributions.empty()) continue;
    // Summation in sorted order makes the mean independent of input order.
    std::sort(contributions.begin(), contributions.end());
    double sum = 0.0;
    for (float v : contributions) sum += v;
    out.values[i] = static_cast<float>(sum / static_cast<double>(contributions.size()));
    out.qa[i] = best_qa;
  }
  return out;
}

}  // namespace aeromix
