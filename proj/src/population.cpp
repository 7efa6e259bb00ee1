#include "checkin/population.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "checkin/analytics.hpp"
#include "checkin/attacker.hpp"
#include "checkin/errors.hpp"
#include "checkin/spatial_index.hpp"

namespace checkin::harness {
namespace {

constexpr double kTeleportMinM = 500'000.0;
constexpr Seconds kTeleportMinDt = 60;
constexpr Seconds kTeleportMaxDt = 1800;
constexpr int kTeleportTries = 64;
constexpr double kEvaderStepDeg = 0.005;

geo::GeoPoint jitter(geo::GeoPoint p, double sigma_m, Rng& rng) {
  const double north = rng.normal() * sigma_m;
  const double east = rng.normal() * sigma_m;
  const double m = geo::meters_per_degree();
  double lat = p.lat + north / m;
  lat = std::clamp(lat, -89.9, 89.9);
  const double lon = p.lon + geo::wrap_lon_delta(east / (m * std::cos(lat * std::numbers::pi / 180.0)));
  return {lat, lon};
}

geo::GeoPoint uniform_in(const attacker::BoundingBox& box, Rng& rng) {
  return {rng.uniform(box.min_lat, box.max_lat), rng.uniform(box.min_lon, box.max_lon)};
}

struct Planner {
  const PopulationConfig& config;
  const VenueIndex& index;
  Seconds end;
  Rng& rng;
  std::vector<PlannedCheckin>& out;

  [[nodiscard]] const IndexedVenue& random_venue() {
    return index.venues()[rng.below(index.size())];
  }

  void honest(UserId user, geo::GeoPoint home, Seconds registered, std::uint32_t& count) {
    const Seconds span = end - registered;
    if (span <= 0) {
      count = 0;
      return;
    }
    count = static_cast<std::uint32_t>(std::min<Seconds>(count, span / kHonestGap));
    if (count == 0) return;
    auto favorites = index.within(home, config.neighborhood_radius_m);
    if (favorites.size() > config.favorite_venues) favorites.resize(config.favorite_venues);
    if (favorites.empty()) favorites.push_back(*index.nearest(home));

    const Seconds slack = span - static_cast<Seconds>(count) * kHonestGap;
    std::vector<Seconds> offsets(count);
    for (auto& o : offsets) {
      o = slack > 0 ? static_cast<Seconds>(rng.below(static_cast<std::uint64_t>(slack))) : 0;
    }
    std::sort(offsets.begin(), offsets.end());
    for (std::uint32_t i = 0; i < count; ++i) {
      const VenueId v = favorites[rng.below(favorites.size())];
      const geo::GeoPoint at = jitter(index.find(v)->location, config.gps_noise_m, rng);
      out.push_back({registered + offsets[i] + static_cast<Seconds>(i) * kHonestGap, user, v, at,
                     at});
    }
  }

  void teleporter(UserId user, geo::GeoPoint home, Seconds registered, std::uint32_t& count) {
    const Seconds span = end - registered;
    if (span < 2 * kTeleportMaxDt + 2 || count < 2) {
      count = 0;
      return;
    }
    const IndexedVenue& first = random_venue();
    const IndexedVenue* second = &random_venue();
    double best = geo::haversine_m(first.location, second->location);
    for (int i = 0; i < kTeleportTries && best < kTeleportMinM; ++i) {
      const IndexedVenue& candidate = random_venue();
      const double d = geo::haversine_m(first.location, candidate.location);
      if (d > best) {
        best = d;
        second = &candidate;
      }
    }
    const Seconds t0 = registered + static_cast<Seconds>(rng.below(static_cast<std::uint64_t>(span / 2)));
    const Seconds t1 = t0 + kTeleportMinDt +
                       static_cast<Seconds>(rng.below(kTeleportMaxDt - kTeleportMinDt + 1));
    out.push_back({t0, user, first.id, first.location, home});
    out.push_back({t1, user, second->id, second->location, home});

    std::vector<Seconds> times(count - 2);
    const auto room = static_cast<std::uint64_t>(end - t1 - 1);
    for (auto& t : times) t = t1 + 1 + static_cast<Seconds>(rng.below(room));
    std::sort(times.begin(), times.end());
    for (Seconds t : times) {
      const IndexedVenue& v = random_venue();
      out.push_back({t, user, v.id, v.location, home});
    }
  }

  void evader(UserId user, geo::GeoPoint home, Seconds registered, std::uint32_t& count) {
    const Seconds span = end - registered;
    if (span <= 0 || count == 0) {
      count = 0;
      return;
    }
    const IndexedVenue& start = random_venue();
    const auto steps = attacker::spiral_steps(start.location, count - 1, kEvaderStepDeg);
    const auto walked = attacker::walk(start.location, steps, index);
    std::vector<attacker::PlannedVenue> path{{start.id, start.location}};
    for (const auto& w : walked) path.push_back({w.venue, w.venue_location});
    const Seconds t0 = registered + static_cast<Seconds>(rng.below(static_cast<std::uint64_t>(
                                        std::max<Seconds>(1, span / 2))));
    const auto schedule = attacker::build_schedule(path, t0);
    std::uint32_t planned = 0;
    for (const auto& e : schedule.entries) {
      if (e.fire_time >= end) break;
      out.push_back({e.fire_time, user, e.venue_id, index.find(e.venue_id)->location, home});
      ++planned;
    }
    count = planned;
  }
};

}  // namespace

Tier sample_tier(std::span<const double> shares, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    acc += shares[i];
    if (u < acc) return static_cast<Tier>(i);
  }
  for (std::size_t i = shares.size(); i-- > 0;) {
    if (shares[i] > 0.0) return static_cast<Tier>(i);
  }
  return Tier::Zero;
}

std::uint32_t sample_power_law(std::uint32_t lo, std::uint32_t hi, double alpha, Rng& rng) {
  const double u = rng.uniform();
  const double a = static_cast<double>(lo);
  const double b = static_cast<double>(hi) + 1.0;
  double x = 0.0;
  if (std::abs(alpha - 1.0) < 1e-12) {
    x = a * std::exp(u * std::log(b / a));
  } else {
    const double e = 1.0 - alpha;
    x = std::pow(std::pow(a, e) + u * (std::pow(b, e) - std::pow(a, e)), 1.0 / e);
  }
  return std::clamp(static_cast<std::uint32_t>(std::floor(x)), lo, hi);
}

std::uint32_t sample_count(Tier tier, const PopulationConfig& config, Rng& rng) {
  const TierBounds& b = config.tiers;
  const double alpha = config.power_law_alpha;
  switch (tier) {
    case Tier::Zero:
      return 0;
    case Tier::Low:
      return sample_power_law(b.low_min, b.low_max, alpha, rng);
    case Tier::Mid:
      return sample_power_law(b.mid_min, b.mid_max, alpha, rng);
    case Tier::Heavy:
      return sample_power_law(b.heavy_min, b.heavy_max, alpha, rng);
    case Tier::Top:
      return sample_power_law(b.top_min, b.top_max, alpha, rng);
  }
  return 0;
}

Tier tier_of(std::uint64_t count, const TierBounds& bounds) {
  if (count == 0) return Tier::Zero;
  if (count >= bounds.top_min) return Tier::Top;
  if (count >= bounds.heavy_min) return Tier::Heavy;
  if (count >= bounds.mid_min) return Tier::Mid;
  return Tier::Low;
}

GeneratedPopulation generate_population(const PopulationConfig& config, World& world,
                                        Seconds start, Seconds end, std::uint64_t seed) {
  config.validate();
  Rng rng(config.seed.value_or(seed));
  GeneratedPopulation pop;

  std::vector<geo::GeoPoint> cities(config.n_cities);
  for (auto& c : cities) c = uniform_in(config.region, rng);

  const double mayor_special = config.special_fraction * config.mayor_only_share;
  for (std::uint32_t i = 0; i < config.n_venues; ++i) {
    const geo::GeoPoint c = cities[rng.below(cities.size())];
    const geo::GeoPoint at = jitter(c, config.city_sigma_m, rng);
    const bool special = rng.uniform() < mayor_special;
    world.register_venue("venue_" + std::to_string(world.venues().size() + 1), at, special);
  }
  if (config.n_users == 0) return pop;
  if (world.venues().empty()) throw InvalidConfig("population users need at least one venue");
  const VenueIndex index = attacker::index_of(world);

  const auto shares = config.tier_shares();
  const double active = shares[2] + shares[3] + shares[4];
  const double cheat_p = active > 0.0 ? std::min(1.0, config.cheater_fraction / active) : 0.0;
  analytics::AccountAgeModel age{config.registration_rate_per_day, start};

  Planner planner{config, index, end, rng, pop.checkins};
  pop.users.reserve(config.n_users);
  pop.tiers.reserve(config.n_users);
  pop.targets.reserve(config.n_users);
  for (std::uint32_t i = 0; i < config.n_users; ++i) {
    const Tier tier = sample_tier(shares, rng);
    std::uint32_t count = sample_count(tier, config, rng);
    const bool cheater = tier >= Tier::Mid && rng.uniform() < cheat_p;
    const geo::GeoPoint home = jitter(cities[rng.below(cities.size())], config.home_sigma_m, rng);
    const UserId user = world.register_user(home, cheater);
    const Seconds registered = age.registered_at(user);
    if (!cheater) {
      planner.honest(user, home, registered, count);
    } else if (config.cheater_strategy == CheaterStrategy::NaiveTeleport) {
      planner.teleporter(user, home, registered, count);
    } else {
      planner.evader(user, home, registered, count);
    }
    if (cheater) pop.cheaters.push_back(user);
    pop.users.push_back(user);
    pop.tiers.push_back(tier);
    pop.targets.push_back(count);
  }
  std::stable_sort(pop.checkins.begin(), pop.checkins.end(),
                   [](const PlannedCheckin& a, const PlannedCheckin& b) {
                     return a.t != b.t ? a.t < b.t : raw(a.user) < raw(b.user);
                   });
  return pop;
}

}  // namespace checkin::harness
