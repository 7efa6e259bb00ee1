#include <doctest.h>

#include "checkin/errors.hpp"
#include "checkin/random.hpp"
#include "checkin/venue_verify.hpp"
#include "support.hpp"

using namespace checkin;
using namespace checkin::verify;
using geo::GeoPoint;

namespace {

const GeoPoint kVenue{34.05, -118.25};

RouterRegistration router(double range = 100.0) {
  RouterRegistration r;
  r.venue_id = VenueId{1};
  r.location = kVenue;
  r.range_m = range;
  return r;
}

}  // namespace

TEST_CASE("defaults") {
  const RouterRegistration r;
  CHECK(r.range_m == 100.0);
  CHECK(r.processing_delay_s == 2e-6);
  CHECK(r.registered);
  CHECK(kSpeedOfLightMPerS == 299'792'458.0);
}

TEST_CASE("presence examples") {
  const auto near = verify_presence(router(), geo::offset_point(kVenue, 10, 50));
  CHECK(near.pass);
  CHECK(near.distance_m == doctest::Approx(50).epsilon(1e-6));

  const auto far = verify_presence(router(), geo::offset_point(kVenue, 200, 150));
  CHECK_FALSE(far.pass);
  CHECK(far.distance_m == doctest::Approx(150).epsilon(1e-6));

  const auto here = verify_presence(router(), kVenue);
  CHECK(here.pass);
  CHECK(here.distance_m == 0.0);
  CHECK(here.rtt_s == 2e-6);
}

TEST_CASE("rtt formula") {
  const double d = 75.0;
  CHECK(simulated_rtt_s(router(), d) == doctest::Approx(2 * d / 299'792'458.0 + 2e-6).epsilon(1e-15));
}

TEST_CASE("unregistered routers cannot attest") {
  auto r = router();
  r.registered = false;
  CHECK_THROWS_AS((void)verify_presence(r, kVenue), UnregisteredRouter);
  RouterRegistry registry;
  registry.add(r);
  CHECK_FALSE(attest_checkin(VenueId{1}, kVenue, registry));
}

TEST_CASE("attestation uses the true location only") {
  RouterRegistry registry;
  registry.add(router());
  CHECK(attest_checkin(VenueId{1}, geo::offset_point(kVenue, 0, 20), registry));
  CHECK_FALSE(attest_checkin(VenueId{1}, geo::offset_point(kVenue, 90, 1'000'000), registry));
  CHECK_FALSE(attest_checkin(VenueId{2}, kVenue, registry));

  RouterRegistry tight;
  tight.add(router(30));
  CHECK_FALSE(attest_checkin(VenueId{1}, geo::offset_point(kVenue, 90, 50), tight));
}

TEST_CASE("registry validates and replaces") {
  RouterRegistry registry;
  CHECK_THROWS_AS(registry.add(router(0)), InvalidConfig);
  CHECK_THROWS_AS(registry.add(router(-5)), InvalidConfig);
  auto neg = router();
  neg.processing_delay_s = -1;
  CHECK_THROWS_AS(registry.add(neg), InvalidConfig);
  registry.add(router(100));
  registry.add(router(40));
  CHECK(registry.size() == 1);
  CHECK(registry.find(VenueId{1})->range_m == 40);
  CHECK(registry.find(VenueId{9}) == nullptr);
}

TEST_CASE("rtt and distance decisions agree") {
  Rng rng(123);
  for (int i = 0; i < 10'000; ++i) {
    RouterRegistration r;
    r.venue_id = VenueId{1};
    r.location = {rng.uniform(-80, 80), rng.uniform(-180, 180)};
    r.range_m = rng.uniform(1, 500);
    r.processing_delay_s = rng.uniform(0, 1e-4);
    const GeoPoint device = geo::offset_point(r.location, rng.uniform(0, 360), rng.uniform(0, 2 * r.range_m));
    CHECK(verify_presence(r, device).pass == within_range(r, device));
  }
}
