#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "checkin/errors.hpp"
#include "checkin/geo.hpp"
#include "checkin/random.hpp"
#include "support.hpp"

using namespace checkin;
using geo::GeoPoint;

namespace {

GeoPoint random_point(Rng& rng) { return {rng.uniform(-90.0, 90.0), rng.uniform(-180.0, 180.0)}; }

}  // namespace

TEST_CASE("haversine known distances") {
  CHECK(geo::haversine_m({0, 0}, {0, 0}) == 0.0);
  const double one_degree = std::numbers::pi * 6'371'000.0 / 180.0;
  CHECK(geo::haversine_m({0, 0}, {0, 1}) == doctest::Approx(one_degree).epsilon(1e-12));
  CHECK(std::abs(geo::haversine_m({0, 0}, {0, 1}) - 111'194.9) <= 0.1);
  const GeoPoint a{40.0, -100.0}, b{40.5, -100.5};
  CHECK(std::abs(geo::haversine_m(a, b) - testing::cosine_law_m(a, b)) <= 0.5);
}

TEST_CASE("haversine is symmetric, non-negative and zero on identity") {
  Rng rng(11);
  for (int i = 0; i < 10'000; ++i) {
    const GeoPoint a = random_point(rng), b = random_point(rng);
    const double ab = geo::haversine_m(a, b);
    CHECK(ab == geo::haversine_m(b, a));
    CHECK(ab >= 0.0);
    CHECK(geo::haversine_m(a, a) == 0.0);
  }
}

TEST_CASE("haversine agrees with the cosine law away from tiny distances") {
  Rng rng(12);
  for (int i = 0; i < 1'000; ++i) {
    const GeoPoint a = random_point(rng), b = random_point(rng);
    CHECK(geo::haversine_m(a, b) == doctest::Approx(testing::cosine_law_m(a, b)).epsilon(1e-6));
  }
}

TEST_CASE("coordinate validation") {
  CHECK(GeoPoint{90, 180}.is_valid());
  CHECK(GeoPoint{-90, -180}.is_valid());
  CHECK_FALSE(GeoPoint{90.0001, 0}.is_valid());
  CHECK_FALSE(GeoPoint{0, -180.5}.is_valid());
  CHECK_FALSE(GeoPoint{std::numeric_limits<double>::quiet_NaN(), 0}.is_valid());
  CHECK_FALSE(GeoPoint{0, std::numeric_limits<double>::infinity()}.is_valid());
  CHECK_THROWS_AS((void)GeoPoint::checked(91, 0), InvalidCoordinate);
  CHECK(GeoPoint::checked(1, 2) == GeoPoint{1, 2});
}

TEST_CASE("project_local examples") {
  const auto same = geo::project_local({12, 34}, {12, 34});
  CHECK(same.east_m == 0.0);
  CHECK(same.north_m == 0.0);

  const auto north = geo::project_local({0, 0}, {0.001, 0});
  CHECK(std::abs(north.north_m - 111.19) <= 0.01);
  CHECK(std::abs(north.north_m - geo::haversine_m({0, 0}, {0.001, 0})) <= 1e-6);

  const auto east = geo::project_local({60, 0}, {60, 0.002});
  CHECK(std::abs(east.east_m - 111.23) <= 0.05);
  const double oracle = 0.002 * std::cos(testing::rad(60)) * std::numbers::pi * 6'371'000.0 / 180.0;
  CHECK(east.east_m == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("project_local range and round trip") {
  CHECK_THROWS_AS((void)geo::project_local({0, 0}, {0.5, 0}), OutOfProjectionRange);
  CHECK_THROWS_AS((void)geo::project_local({0, 0}, {0, 0.45}), OutOfProjectionRange);
  Rng rng(5);
  for (int i = 0; i < 2'000; ++i) {
    const GeoPoint origin{rng.uniform(-70, 70), rng.uniform(-179, 179)};
    const GeoPoint p = testing::shifted(origin, rng.uniform(-7000, 7000), rng.uniform(-7000, 7000));
    const auto off = geo::project_local(origin, p);
    const GeoPoint back = geo::unproject_local(origin, off);
    CHECK(geo::haversine_m(p, back) <= 0.01);
  }
}

TEST_CASE("project_local across the antimeridian") {
  const auto off = geo::project_local({0, 179.9995}, {0, -179.9995});
  CHECK(off.east_m == doctest::Approx(0.001 * std::numbers::pi * 6'371'000.0 / 180.0));
}

TEST_CASE("fits_square examples") {
  const GeoPoint o{40.0, -100.0};
  const std::vector<GeoPoint> single{o};
  CHECK(geo::fits_square(single, 180));
  const std::vector<GeoPoint> apart{o, testing::shifted(o, 0, 500)};
  CHECK_FALSE(geo::fits_square(apart, 180));
  const std::vector<GeoPoint> cluster{o, testing::shifted(o, 100, 0), testing::shifted(o, 0, 100),
                                      testing::shifted(o, 100, 100)};
  CHECK(geo::fits_square(cluster, 180));
  const std::vector<GeoPoint> far{o, {41.0, -100.0}};
  CHECK_THROWS_AS((void)geo::fits_square(far, 180), OutOfProjectionRange);
}

TEST_CASE("fits_square edges on width and height separately") {
  const GeoPoint o{10.0, 20.0};
  const std::vector<GeoPoint> tall{o, testing::shifted(o, 179, 0)};
  CHECK(geo::fits_square(tall, 180));
  const std::vector<GeoPoint> taller{o, testing::shifted(o, 181, 0)};
  CHECK_FALSE(geo::fits_square(taller, 180));
  const std::vector<GeoPoint> wide{o, testing::shifted(o, 0, 181)};
  CHECK_FALSE(geo::fits_square(wide, 180));
}

TEST_CASE("fits_square is monotone in side and order independent") {
  Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    const GeoPoint o{rng.uniform(-60, 60), rng.uniform(-170, 170)};
    std::vector<GeoPoint> pts;
    const auto n = 1 + rng.below(6);
    for (std::uint64_t k = 0; k < n; ++k) {
      pts.push_back(testing::shifted(o, rng.uniform(-150, 150), rng.uniform(-150, 150)));
    }
    const double side = rng.uniform(10, 400);
    if (geo::fits_square(pts, side)) {
      CHECK(geo::fits_square(pts, side * 1.01));
      CHECK(geo::fits_square(pts, side + 1000));
    }
    std::vector<GeoPoint> reversed(pts.rbegin(), pts.rend());
    CHECK(geo::fits_square(pts, side) == geo::fits_square(reversed, side));
  }
}

TEST_CASE("offset_point examples") {
  CHECK(geo::offset_point({40, -100}, 123, 0) == GeoPoint{40, -100});
  const GeoPoint north = geo::offset_point({0, 0}, 0, 111'194.9);
  CHECK(std::abs(north.lat - 1.0) <= 1e-5);
  CHECK(std::abs(north.lon) <= 1e-5);
  const GeoPoint west = geo::offset_point({40, -100}, 270, 457.2);
  CHECK(std::abs(geo::haversine_m({40, -100}, west) - 457.2) <= 0.5);
  CHECK(west.lon < -100.0);
  CHECK(std::abs(west.lat - 40.0) < 1e-4);
}

TEST_CASE("offset then measure stays within 0.1%") {
  Rng rng(31);
  for (int i = 0; i < 5'000; ++i) {
    const GeoPoint o{rng.uniform(-80, 80), rng.uniform(-180, 180)};
    const double d = rng.uniform(1, 50'000);
    const GeoPoint p = geo::offset_point(o, rng.uniform(0, 360), d);
    CHECK(p.is_valid());
    CHECK(std::abs(geo::haversine_m(o, p) - d) <= 1e-3 * d);
  }
}

TEST_CASE("offset_point rejects impossible distances") {
  CHECK_THROWS_AS((void)geo::offset_point({0, 0}, 0, -1), OutOfProjectionRange);
  CHECK_THROWS_AS((void)geo::offset_point({0, 0}, 0, 3e7), OutOfProjectionRange);
}

TEST_CASE("wrap_lon_delta") {
  CHECK(geo::wrap_lon_delta(0) == 0);
  CHECK(geo::wrap_lon_delta(190) == doctest::Approx(-170));
  CHECK(geo::wrap_lon_delta(-190) == doctest::Approx(170));
  CHECK(geo::wrap_lon_delta(180) == doctest::Approx(-180));
}
