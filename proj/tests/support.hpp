#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "checkin/geo.hpp"

namespace testing {

inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::path(CHECKIN_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline double rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Spherical law of cosines, independent of the haversine implementation.
inline double cosine_law_m(checkin::geo::GeoPoint a, checkin::geo::GeoPoint b) {
  const double c = std::sin(rad(a.lat)) * std::sin(rad(b.lat)) +
                   std::cos(rad(a.lat)) * std::cos(rad(b.lat)) * std::cos(rad(b.lon - a.lon));
  return 6'371'000.0 * std::acos(std::clamp(c, -1.0, 1.0));
}

// Point displaced north/east by a flat-earth offset; fine at meter scale.
inline checkin::geo::GeoPoint shifted(checkin::geo::GeoPoint p, double north_m, double east_m) {
  const double m = std::numbers::pi * 6'371'000.0 / 180.0;
  return {p.lat + north_m / m, p.lon + east_m / (m * std::cos(rad(p.lat)))};
}

}  // namespace testing
