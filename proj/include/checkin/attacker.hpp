#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "checkin/geo.hpp"
#include "checkin/spatial_index.hpp"
#include "checkin/tables.hpp"
#include "checkin/types.hpp"
#include "checkin/world.hpp"

namespace checkin::attacker {

// Check-in spacing that never trips the speed rule: five minutes up to one
// mile, five minutes per mile beyond.
inline constexpr Seconds kBaseInterval = 300;
// Minimum spacing between two visits to the same venue.
inline constexpr Seconds kRevisitInterval = 3600;

struct BoundingBox {
  double min_lat = -90.0;
  double max_lat = 90.0;
  double min_lon = -180.0;
  double max_lon = 180.0;

  [[nodiscard]] bool contains(geo::GeoPoint p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
};

struct TargetCriteria {
  bool require_mayor_special = false;
  bool require_vacant_mayor = false;
  std::optional<BoundingBox> region;
  std::optional<std::string> name_filter;  // substring match, case-sensitive
};

// Venues meeting every set criterion, ascending id.
std::vector<VenueId> select_targets(std::span<const VenueRow> venues,
                                    const TargetCriteria& criteria);

// Moves step_m along bearing_deg from `current` and returns the venue closest
// to that target (lowest id on ties). Throws NoVenuesAvailable.
VenueId plan_step(geo::GeoPoint current, double bearing_deg, double step_m,
                  const VenueIndex& index);

struct Step {
  double bearing_deg = 0.0;
  double distance_m = 0.0;
};

struct StepResult {
  geo::GeoPoint target;
  VenueId venue{};
  geo::GeoPoint venue_location;
};

// Semiautomatic mode: each step starts from the venue chosen by the previous
// one, the way the spoofed position jumps to the found venue.
std::vector<StepResult> walk(geo::GeoPoint start, std::span<const Step> steps,
                             const VenueIndex& index);

// Square spiral of `count` steps of step_deg degrees: north first, then
// turning right, with leg lengths 1, 1, 2, 2, 3, 3, ...
std::vector<Step> spiral_steps(geo::GeoPoint start, std::size_t count, double step_deg);

// Step length in meters of `step_deg` degrees along a cardinal bearing.
double degree_step_m(geo::GeoPoint at, double bearing_deg, double step_deg);

struct ScheduleEntry {
  VenueId venue_id{};
  Seconds fire_time = 0;

  bool operator==(const ScheduleEntry&) const = default;
};

struct AttackSchedule {
  std::vector<ScheduleEntry> entries;

  bool operator==(const AttackSchedule&) const = default;
};

struct PlannedVenue {
  VenueId id{};
  geo::GeoPoint location;
};

// Spacing required after covering distance_m.
Seconds interval_for(double distance_m);

AttackSchedule build_schedule(std::span<const PlannedVenue> venues, Seconds start_time);

// `days` passes of build_schedule over the same venues. Each pass starts at
// least a day after the previous one and after the trip back to the first
// venue, so every venue collects one distinct day per pass.
AttackSchedule build_daily_schedule(std::span<const PlannedVenue> venues, Seconds start_time,
                                    std::uint32_t days);

// Nearest-neighbour visiting order starting from the first venue.
std::vector<PlannedVenue> order_by_proximity(std::vector<PlannedVenue> venues);

// Empty when the schedule keeps strictly increasing times, the distance
// interval and the revisit spacing.
std::vector<std::string> schedule_violations(const AttackSchedule& schedule,
                                             const VenueIndex& venues);

// Submits every entry with reported GPS set to the venue's registered location
// while the device stays at true_location.
std::vector<CheckInRecord> execute(const AttackSchedule& schedule, World& world,
                                   UserId attacker, geo::GeoPoint true_location);

// Venues where the victim is a recent visitor or the mayor, ascending id.
// Throws UnknownVictim when the victim has no public profile.
std::vector<VenueId> plan_mayor_denial(UserId victim, const PublicTables& tables);

std::vector<PlannedVenue> resolve(std::span<const VenueId> ids, const VenueIndex& venues);
VenueIndex index_of(const World& world);
VenueIndex index_of(std::span<const VenueRow> venues);

void write_schedule(const AttackSchedule& schedule, const std::filesystem::path& path);
AttackSchedule load_schedule(const std::filesystem::path& path);
void write_target_list(std::span<const VenueId> ids, const std::filesystem::path& path);
std::vector<VenueId> load_target_list(const std::filesystem::path& path);

}  // namespace checkin::attacker
