#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "checkin/geo.hpp"
#include "checkin/types.hpp"

namespace checkin::anticheat {

enum class Flag : std::uint8_t {
  FrequentCheckin,
  SuperHumanSpeed,
  RapidFire,
  GpsMismatch,
  // Raised outside the rule engine, by venue-side verification in strict mode.
  VenueUnverified,
};

std::string_view flag_name(Flag flag);
std::optional<Flag> parse_flag(std::string_view name);

// A raised flag together with the quantity that triggered it: elapsed seconds
// (FrequentCheckin), implied speed in m/s (SuperHumanSpeed), number of
// check-ins in the square (RapidFire), offset or router distance in meters
// (GpsMismatch, VenueUnverified).
struct FlagDetail {
  Flag flag;
  double measured;

  bool operator==(const FlagDetail&) const = default;
};

class RuleVerdict {
 public:
  [[nodiscard]] bool valid() const { return details_.empty(); }
  [[nodiscard]] bool has(Flag flag) const;
  [[nodiscard]] std::optional<double> detail(Flag flag) const;
  [[nodiscard]] const std::vector<FlagDetail>& details() const { return details_; }
  [[nodiscard]] std::vector<Flag> flags() const;

  // Adds a flag; raising the same flag twice keeps the first measurement.
  void raise(Flag flag, double measured);

  bool operator==(const RuleVerdict&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(details_);
  }

 private:
  std::vector<FlagDetail> details_;  // ordered by Flag
};

template <class Archive>
void serialize(Archive& ar, FlagDetail& d) {
  ar(d.flag, d.measured);
}

struct RuleConfig {
  double frequent_window_s = 3600.0;
  // One mile per five minutes.
  double max_speed_m_per_s = geo::kMetersPerMile / 300.0;
  double rapidfire_side_m = 180.0;
  double rapidfire_window_s = 60.0;
  int rapidfire_count = 4;
  double gps_radius_m = 500.0;

  // Throws InvalidConfig unless every field is strictly positive.
  void validate() const;

  bool operator==(const RuleConfig&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(frequent_window_s, max_speed_m_per_s, rapidfire_side_m, rapidfire_window_s,
       rapidfire_count, gps_radius_m);
  }
};

// One entry of a user's check-in history as seen by the rules. Only the
// venue's registered location is visible; device ground truth never is.
struct PriorCheckin {
  VenueId venue_id{};
  geo::GeoPoint venue_location;
  Seconds t = 0;
  bool valid = true;

  bool operator==(const PriorCheckin&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(venue_id, venue_location, t, valid);
  }
};

struct VenueRef {
  VenueId id{};
  geo::GeoPoint location;
};

// Same-venue re-check-in within the window. Returns elapsed seconds.
std::optional<double> rule_frequent(std::span<const PriorCheckin> history, VenueId venue,
                                    Seconds t, const RuleConfig& config = {});

// Implied speed from the last valid check-in. Returns the speed in m/s; a
// simultaneous check-in at a different place has infinite speed.
std::optional<double> rule_speed(const std::optional<PriorCheckin>& last_valid,
                                 geo::GeoPoint venue_location, Seconds t,
                                 const RuleConfig& config = {});

// `recent` are the user's valid check-ins inside the rapid-fire window. Flags
// when the candidate would be the rapidfire_count-th member of a group that
// fits the configured square. Returns the group size.
std::optional<double> rule_rapidfire(std::span<const PriorCheckin> recent,
                                     geo::GeoPoint candidate, const RuleConfig& config = {});

// Reported position too far from the venue. Returns the offset in meters.
std::optional<double> rule_gps(geo::GeoPoint reported, geo::GeoPoint venue_location,
                               const RuleConfig& config = {});

// Valid check-ins of `history` that fall inside the rapid-fire window before t.
std::vector<PriorCheckin> rapidfire_window(std::span<const PriorCheckin> history, Seconds t,
                                           const RuleConfig& config);

std::optional<PriorCheckin> last_valid(std::span<const PriorCheckin> history);

// Runs every rule. `history` is the submitting user's earlier check-ins in
// time order; invalid entries are ignored by all rules.
RuleVerdict evaluate(std::span<const PriorCheckin> history, const VenueRef& venue,
                     geo::GeoPoint reported_gps, Seconds t, const RuleConfig& config = {});

// Oldest timestamp that can still influence a verdict at time t or later.
Seconds history_horizon(Seconds t, const RuleConfig& config);

}  // namespace checkin::anticheat
