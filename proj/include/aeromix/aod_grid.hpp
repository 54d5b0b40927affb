#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aeromix/date.hpp"
#include "aeromix/geo.hpp"

namespace aeromix {

enum class Sensor { ModisTerra, ModisAqua, ViirsSnpp };
enum class Algorithm { DeepBlue, DarkTarget };

const char* to_string(Sensor s);      // "MODIS-Terra", "MODIS-Aqua", "VIIRS-SNPP"
const char* to_string(Algorithm a);   // "DB", "DT"
Sensor sensor_from_string(const std::string& s);
Algorithm algorithm_from_string(const std::string& s);
// Lowercase tokens used in file names: terra/aqua/snpp, db/dt.
const char* file_token(Sensor s);
const char* file_token(Algorithm a);

// One gridded AOD retrieval: values plus parallel per-pixel retrieval
// quality codes 0 (worst) .. 3 (best). A pixel is valid iff its value is not
// the nodata sentinel; valid values are finite and nonnegative. Values are
// stored as float so the 9-significant-digit text form round-trips exactly.
struct AODGrid {
  GridGeometry geom;
  Sensor sensor = Sensor::ModisTerra;
  Algorithm algorithm = Algorithm::DeepBlue;
  Date date;
  std::vector<float> values;
  std::vector<std::uint8_t> qa;

  float value(int r, int c) const { return values[geom.index(r, c)]; }
  int qa_code(int r, int c) const { return qa[geom.index(r, c)]; }
  bool valid(int r, int c) const { return values[geom.index(r, c)] != geom.nodata; }

  // Enforces all type invariants; throws validation-error on violation.
  void validate() const;
};

// AGF text format reader/writer. Header lines are `key = value` for ncols,
// nrows, xllcorner, yllcorner, cellsize, nodata_value, sensor, algorithm,
// date; a VALUES block and a QA block follow, nrows lines each.
AODGrid load_grid(const std::string& path);
void write_grid(const AODGrid& grid, const std::string& path);

// Per-pixel mean over the valid values of co-registered swaths of one
// product; qa of a merged pixel is the max over contributing swaths. The
// result is independent of input order.
AODGrid merge_swaths(const std::vector<AODGrid>& grids);

}  // namespace aeromix
