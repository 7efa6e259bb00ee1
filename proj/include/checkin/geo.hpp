#pragma once

#include <span>

namespace checkin::geo {

// Spherical Earth; every distance in the simulator derives from this radius.
inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kMetersPerMile = 1'609.344;
// Largest origin distance accepted by the local equirectangular projection.
inline constexpr double kProjectionRangeM = 50'000.0;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]

  bool operator==(const GeoPoint&) const = default;

  [[nodiscard]] bool is_valid() const;

  // Throws InvalidCoordinate unless is_valid().
  static GeoPoint checked(double lat, double lon);
};

template <class Archive>
void serialize(Archive& ar, GeoPoint& p) {
  ar(p.lat, p.lon);
}

// Offset of a point from a projection origin, in meters.
struct LocalOffset {
  double east_m = 0.0;
  double north_m = 0.0;
};

// Meters per degree of latitude on the reference sphere.
double meters_per_degree();

double haversine_m(GeoPoint a, GeoPoint b);

// Equirectangular projection about `origin`. Throws OutOfProjectionRange when
// `p` is 50 km or more from `origin`.
LocalOffset project_local(GeoPoint origin, GeoPoint p);

// Inverse of project_local.
GeoPoint unproject_local(GeoPoint origin, LocalOffset offset);

// True iff the bounding box of the projected points is at most side_m on both
// axes. Projected about the middle latitude of the set; order independent.
bool fits_square(std::span<const GeoPoint> points, double side_m);

// Destination reached by travelling dist_m along the great circle that leaves
// `origin` at `bearing_deg` (clockwise from north).
GeoPoint offset_point(GeoPoint origin, double bearing_deg, double dist_m);

// Wraps a longitude difference into [-180, 180).
double wrap_lon_delta(double dlon_deg);

}  // namespace checkin::geo
