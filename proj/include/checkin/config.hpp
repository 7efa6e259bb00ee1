#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "checkin/analytics.hpp"
#include "checkin/attacker.hpp"
#include "checkin/world.hpp"

namespace checkin::harness {

enum class CheaterStrategy : std::uint8_t { NaiveTeleport, ScheduledEvader };

// Share of users in each activity tier. Tiers are bounded by
// TierBounds; the two middle tiers default to a truncated power law filling
// whatever mass the anchored tiers leave.
struct ActivityMix {
  double zero = 0.363;
  double low = 0.204;
  std::optional<double> mid;
  std::optional<double> heavy;
  double top = 0.002;
};

struct TierBounds {
  std::uint32_t low_min = 1, low_max = 5;
  std::uint32_t mid_min = 6, mid_max = 99;
  std::uint32_t heavy_min = 100, heavy_max = 999;
  std::uint32_t top_min = 1000, top_max = 4000;
};

struct PopulationConfig {
  std::uint32_t n_users = 0;
  std::uint32_t n_venues = 0;
  std::optional<std::uint64_t> seed;
  ActivityMix activity;
  TierBounds tiers;
  double power_law_alpha = 2.0;
  double cheater_fraction = 0.0;
  CheaterStrategy cheater_strategy = CheaterStrategy::NaiveTeleport;
  // Share of venues running any special, and the share of those specials that
  // are for mayors only.
  double special_fraction = 0.05;
  double mayor_only_share = 0.9;
  attacker::BoundingBox region{25.0, 49.0, -124.0, -67.0};
  std::uint32_t n_cities = 40;
  double city_sigma_m = 4'000.0;
  double home_sigma_m = 3'000.0;
  double neighborhood_radius_m = 8'000.0;
  std::uint32_t favorite_venues = 20;
  double gps_noise_m = 15.0;
  double registration_rate_per_day = 0.0;

  // Resolved tier shares {zero, low, mid, heavy, top}.
  [[nodiscard]] std::vector<double> tier_shares() const;
  void validate() const;
};

struct ExplicitVenue {
  std::string name;
  geo::GeoPoint location;
  bool has_mayor_special = false;
};

struct ScriptedCheckin {
  VenueId venue_id{};
  Seconds t = 0;
};

struct ExplicitUser {
  geo::GeoPoint home;
  std::vector<ScriptedCheckin> checkins;
};

enum class AttackKind : std::uint8_t { Tour, VacancySweep, MayorDenial, Schedule };

struct AttackScript {
  std::string name;
  AttackKind kind = AttackKind::Tour;
  geo::GeoPoint true_location;
  Seconds start_time = 0;
  // Tour
  std::optional<VenueId> start_venue;
  std::optional<geo::GeoPoint> start_point;
  std::size_t steps = 24;
  double step_deg = 0.005;
  // VacancySweep
  attacker::TargetCriteria criteria;
  std::optional<std::size_t> limit;
  // MayorDenial
  UserId victim{};
  // VacancySweep and MayorDenial: visit the target list once per day.
  std::uint32_t repeat_days = 1;
  // Schedule
  attacker::AttackSchedule schedule;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  Seconds start_time = 0;
  std::uint32_t duration_days = 30;
  WorldConfig world;
  std::vector<verify::RouterRegistration> routers;  // location filled from the venue
  std::optional<verify::RouterRegistration> router_all_venues;
  std::vector<ExplicitVenue> venues;
  std::vector<ExplicitUser> users;
  PopulationConfig population;
  std::vector<AttackScript> attacks;
  std::uint32_t snapshot_every_days = 1;  // 0: final export only
  bool save_state = true;
  analytics::Thresholds thresholds;
  std::filesystem::path output_dir = "out";

  void validate() const;
};

// Throws InvalidConfig on unknown keys, wrong types or failed validation.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);

anticheat::RuleConfig parse_rules(const nlohmann::json& doc);
std::vector<rewards::BadgeSpec> parse_badges(const nlohmann::json& doc);

}  // namespace checkin::harness
