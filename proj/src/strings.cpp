#include "aeromix/strings.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace aeromix {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == delim) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t.empty()) fail(ErrorClass::ParseError, "empty value for " + what);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) {
    fail(ErrorClass::ParseError, "bad number '" + t + "' for " + what);
  }
  return v;
}

float parse_float(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t.empty()) fail(ErrorClass::ParseError, "empty value for " + what);
  char* end = nullptr;
  const float v = std::strtof(t.c_str(), &end);
  if (end != t.c_str() + t.size()) {
    fail(ErrorClass::ParseError, "bad number '" + t + "' for " + what);
  }
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t.empty()) fail(ErrorClass::ParseError, "empty value for " + what);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) {
    fail(ErrorClass::ParseError, "bad integer '" + t + "' for " + what);
  }
  return v;
}

std::string format_float(float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_g(double v, int significant_digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace aeromix
