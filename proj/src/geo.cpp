#include "aeromix/geo.hpp"

#include <cmath>

namespace aeromix {

double distance(const Location& a, const Location& b) {
  return std::hypot(a.east - b.east, a.north - b.north);
}

}  // namespace aeromix
