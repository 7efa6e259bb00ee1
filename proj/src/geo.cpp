#include "checkin/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "checkin/errors.hpp"

namespace checkin::geo {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

bool GeoPoint::is_valid() const {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
         lon >= -180.0 && lon <= 180.0;
}

GeoPoint GeoPoint::checked(double lat, double lon) {
  GeoPoint p{lat, lon};
  if (!p.is_valid()) {
    throw InvalidCoordinate("invalid coordinate (" + std::to_string(lat) + ", " +
                            std::to_string(lon) + ")");
  }
  return p;
}

double meters_per_degree() { return std::numbers::pi * kEarthRadiusM / 180.0; }

double wrap_lon_delta(double dlon_deg) {
  double d = std::fmod(dlon_deg + 180.0, 360.0);
  if (d < 0) d += 360.0;
  return d - 180.0;
}

double haversine_m(GeoPoint a, GeoPoint b) {
  if (a == b) return 0.0;
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlat = (b.lat - a.lat) * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

LocalOffset project_local(GeoPoint origin, GeoPoint p) {
  const double d = haversine_m(origin, p);
  if (!(d < kProjectionRangeM)) {
    throw OutOfProjectionRange("point is " + std::to_string(d) +
                               " m from projection origin (limit 50 km)");
  }
  const double k = meters_per_degree();
  return LocalOffset{
      .east_m = wrap_lon_delta(p.lon - origin.lon) * std::cos(origin.lat * kDegToRad) * k,
      .north_m = (p.lat - origin.lat) * k,
  };
}

GeoPoint unproject_local(GeoPoint origin, LocalOffset offset) {
  const double k = meters_per_degree();
  const double lat = origin.lat + offset.north_m / k;
  const double lon = origin.lon + offset.east_m / (std::cos(origin.lat * kDegToRad) * k);
  return GeoPoint{lat, wrap_lon_delta(lon)};
}

bool fits_square(std::span<const GeoPoint> points, double side_m) {
  if (points.empty()) return true;
  const GeoPoint first = points.front();
  double min_lat = first.lat;
  double max_lat = first.lat;
  for (const GeoPoint& p : points) {
    // Enforces mutual projection range before any geometry.
    if (!(haversine_m(first, p) < kProjectionRangeM)) {
      throw OutOfProjectionRange("fits_square: points span more than 50 km");
    }
    min_lat = std::min(min_lat, p.lat);
    max_lat = std::max(max_lat, p.lat);
  }
  const GeoPoint origin{(min_lat + max_lat) / 2.0, first.lon};
  double min_e = 0.0, max_e = 0.0, min_n = 0.0, max_n = 0.0;
  bool seeded = false;
  for (const GeoPoint& p : points) {
    const LocalOffset o = project_local(origin, p);
    if (!seeded) {
      min_e = max_e = o.east_m;
      min_n = max_n = o.north_m;
      seeded = true;
      continue;
    }
    min_e = std::min(min_e, o.east_m);
    max_e = std::max(max_e, o.east_m);
    min_n = std::min(min_n, o.north_m);
    max_n = std::max(max_n, o.north_m);
  }
  return (max_e - min_e) <= side_m && (max_n - min_n) <= side_m;
}

GeoPoint offset_point(GeoPoint origin, double bearing_deg, double dist_m) {
  if (!std::isfinite(dist_m) || dist_m < 0.0 ||
      dist_m > std::numbers::pi * kEarthRadiusM) {
    throw OutOfProjectionRange("offset distance " + std::to_string(dist_m) +
                               " m outside [0, half circumference]");
  }
  if (dist_m == 0.0) return origin;
  const double delta = dist_m / kEarthRadiusM;
  const double theta = bearing_deg * kDegToRad;
  const double lat1 = origin.lat * kDegToRad;
  const double lon1 = origin.lon * kDegToRad;
  const double sin_lat2 =
      std::sin(lat1) * std::cos(delta) + std::cos(lat1) * std::sin(delta) * std::cos(theta);
  const double lat2 = std::asin(std::clamp(sin_lat2, -1.0, 1.0));
  const double lon2 =
      lon1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(lat1),
                        std::cos(delta) - std::sin(lat1) * std::sin(lat2));
  double lon_deg = lon2 * kRadToDeg;
  if (lon_deg < -180.0 || lon_deg > 180.0) lon_deg = wrap_lon_delta(lon_deg);
  return GeoPoint{lat2 * kRadToDeg, lon_deg};
}

}  // namespace checkin::geo
