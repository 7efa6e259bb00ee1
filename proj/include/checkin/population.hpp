#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "checkin/config.hpp"
#include "checkin/random.hpp"
#include "checkin/world.hpp"

namespace checkin::harness {

enum class Tier : std::uint8_t { Zero, Low, Mid, Heavy, Top };

inline constexpr std::size_t kTierCount = 5;

// Spacing between an honest user's consecutive check-ins; just over the
// frequent-check-in window so no honest submission is ever invalidated.
inline constexpr Seconds kHonestGap = 3601;

struct PlannedCheckin {
  Seconds t = 0;
  UserId user{};
  VenueId venue{};
  geo::GeoPoint reported;
  geo::GeoPoint true_gps;
};

struct GeneratedPopulation {
  std::vector<UserId> users;
  std::vector<Tier> tiers;               // parallel to users
  std::vector<std::uint32_t> targets;    // planned check-in count per user
  std::vector<UserId> cheaters;
  std::vector<PlannedCheckin> checkins;  // sorted by time, then user
};

Tier sample_tier(std::span<const double> shares, Rng& rng);

// Draws an integer from a power law with exponent alpha truncated to [lo, hi].
std::uint32_t sample_power_law(std::uint32_t lo, std::uint32_t hi, double alpha, Rng& rng);

std::uint32_t sample_count(Tier tier, const PopulationConfig& config, Rng& rng);

Tier tier_of(std::uint64_t count, const TierBounds& bounds);

// Registers config.n_venues venues and config.n_users users into `world` and
// plans their check-ins over [start, end). Honest users stay near home;
// naive_teleport cheaters jump between random venues; scheduled_evader
// cheaters walk a spiral paced to pass every rule.
GeneratedPopulation generate_population(const PopulationConfig& config, World& world,
                                        Seconds start, Seconds end, std::uint64_t seed);

}  // namespace checkin::harness
