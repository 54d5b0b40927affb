#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aeromix/error.hpp"

namespace aeromix {

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char delim);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

// Strict numeric parsing; `what` names the field in error messages.
double parse_double(const std::string& s, const std::string& what);
float parse_float(const std::string& s, const std::string& what);
long parse_long(const std::string& s, const std::string& what);

// Shortest decimal form that round-trips the value exactly: %.9g for float,
// %.17g for double.
std::string format_float(float v);
std::string format_double(double v);
// Fixed significant digits (grid serialization uses 9).
std::string format_g(double v, int significant_digits);

// FNV-1a 64-bit, used for config hashes in run manifests.
std::uint64_t fnv1a64(const std::string& bytes);
std::string to_hex(std::uint64_t v);

}  // namespace aeromix
