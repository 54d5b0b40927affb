#pragma once

#include <cstddef>

namespace aeromix {

struct Location {
  double east = 0.0;   // meters
  double north = 0.0;  // meters
};

// Row-major raster geometry. Row 0 is the northernmost row; the origin is
// the lower-left corner, so cell (r, c) has center
//   east  = origin_east  + (c + 0.5) * cellsize
//   north = origin_north + (nrows - r - 0.5) * cellsize
struct GridGeometry {
  int nrows = 0;
  int ncols = 0;
  double origin_east = 0.0;
  double origin_north = 0.0;
  double cellsize = 1.0;
  float nodata = -9999.0f;

  std::size_t size() const {
    return static_cast<std::size_t>(nrows) * static_cast<std::size_t>(ncols);
  }
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(ncols) +
           static_cast<std::size_t>(c);
  }
  Location cell_center(int r, int c) const {
    return {origin_east + (c + 0.5) * cellsize,
            origin_north + (nrows - r - 0.5) * cellsize};
  }
  bool contains(const Location& p) const {
    return p.east >= origin_east && p.east < origin_east + ncols * cellsize &&
           p.north >= origin_north && p.north < origin_north + nrows * cellsize;
  }
  // Cell containing the point; caller checks contains() first.
  void cell_of(const Location& p, int& r, int& c) const {
    c = static_cast<int>((p.east - origin_east) / cellsize);
    r = nrows - 1 - static_cast<int>((p.north - origin_north) / cellsize);
    if (c < 0) c = 0;
    if (c >= ncols) c = ncols - 1;
    if (r < 0) r = 0;
    if (r >= nrows) r = nrows - 1;
  }
  bool same_shape(const GridGeometry& o) const {
    return nrows == o.nrows && ncols == o.ncols &&
           origin_east == o.origin_east && origin_north == o.origin_north &&
           cellsize == o.cellsize && nodata == o.nodata;
  }
};

double distance(const Location& a, const Location& b);

}  // namespace aeromix
