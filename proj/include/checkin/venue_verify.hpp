#pragma once

#include <map>
#include <optional>
#include <vector>

#include "checkin/geo.hpp"
#include "checkin/types.hpp"

namespace checkin::verify {

inline constexpr double kSpeedOfLightMPerS = 299'792'458.0;

// A Wi-Fi router registered by a venue to attest device presence.
struct RouterRegistration {
  VenueId venue_id{};
  geo::GeoPoint location;
  double range_m = 100.0;
  double processing_delay_s = 2e-6;
  bool registered = true;

  bool operator==(const RouterRegistration&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(venue_id, location, range_m, processing_delay_s, registered);
  }
};

struct PresenceResult {
  bool pass = false;
  double distance_m = 0.0;
  double rtt_s = 0.0;
};

// How attestation feeds back into check-in validity.
enum class Mode : std::uint8_t {
  Off,     // routers ignored
  Mark,    // record the attestation result only
  Strict,  // unattested check-ins are invalid
};

double simulated_rtt_s(const RouterRegistration& router, double distance_m);

// Pass/fail from the round-trip delay. Throws UnregisteredRouter.
PresenceResult verify_presence(const RouterRegistration& router,
                               geo::GeoPoint device_true_location);

// The same decision computed from distance alone.
bool within_range(const RouterRegistration& router, geo::GeoPoint device_true_location);

class RouterRegistry {
 public:
  // Replaces any earlier router at the same venue. Throws InvalidConfig on a
  // non-positive range.
  void add(RouterRegistration router);

  [[nodiscard]] const RouterRegistration* find(VenueId venue) const;
  [[nodiscard]] std::size_t size() const { return routers_.size(); }
  [[nodiscard]] bool empty() const { return routers_.empty(); }

  bool operator==(const RouterRegistry&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(routers_);
  }

 private:
  std::map<VenueId, RouterRegistration> routers_;
};

// True iff the venue has a registered router and the device's true location
// passes verify_presence against it. Reported GPS plays no part.
bool attest_checkin(VenueId venue, geo::GeoPoint device_true_location,
                    const RouterRegistry& routers);

}  // namespace checkin::verify
