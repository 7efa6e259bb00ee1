#include "checkin/venue_verify.hpp"

#include <cmath>
#include <string>

#include "checkin/errors.hpp"

namespace checkin::verify {

double simulated_rtt_s(const RouterRegistration& router, double distance_m) {
  return 2.0 * distance_m / kSpeedOfLightMPerS + router.processing_delay_s;
}

PresenceResult verify_presence(const RouterRegistration& router,
                               geo::GeoPoint device_true_location) {
  if (!router.registered) {
    throw UnregisteredRouter("router for venue " + std::to_string(raw(router.venue_id)) +
                             " is not registered");
  }
  PresenceResult result;
  result.distance_m = geo::haversine_m(router.location, device_true_location);
  result.rtt_s = simulated_rtt_s(router, result.distance_m);
  result.pass = result.rtt_s <= simulated_rtt_s(router, router.range_m);
  return result;
}

bool within_range(const RouterRegistration& router, geo::GeoPoint device_true_location) {
  return geo::haversine_m(router.location, device_true_location) <= router.range_m;
}

void RouterRegistry::add(RouterRegistration router) {
  if (!(std::isfinite(router.range_m) && router.range_m > 0.0)) {
    throw InvalidConfig("router range_m must be positive");
  }
  if (!(std::isfinite(router.processing_delay_s) && router.processing_delay_s >= 0.0)) {
    throw InvalidConfig("router processing_delay_s must be non-negative");
  }
  routers_[router.venue_id] = router;
}

const RouterRegistration* RouterRegistry::find(VenueId venue) const {
  auto it = routers_.find(venue);
  return it == routers_.end() ? nullptr : &it->second;
}

bool attest_checkin(VenueId venue, geo::GeoPoint device_true_location,
                    const RouterRegistry& routers) {
  const RouterRegistration* router = routers.find(venue);
  if (router == nullptr || !router->registered) return false;
  return verify_presence(*router, device_true_location).pass;
}

}  // namespace checkin::verify
