#include "checkin/anticheat.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "checkin/errors.hpp"

namespace checkin::anticheat {
namespace {

constexpr std::array<std::string_view, 5> kFlagNames = {
    "FrequentCheckin", "SuperHumanSpeed", "RapidFire", "GpsMismatch", "VenueUnverified"};

// Depth-first search for `need` members of `pool` that, with `group`, fit the
// square. Failing prefixes are pruned.
bool find_group(std::span<const geo::GeoPoint> pool, std::size_t need,
                std::vector<geo::GeoPoint>& group, double side_m) {
  if (!geo::fits_square(group, side_m)) return false;
  if (need == 0) return true;
  if (pool.size() < need) return false;
  for (std::size_t i = 0; i + need <= pool.size(); ++i) {
    group.push_back(pool[i]);
    const bool found = find_group(pool.subspan(i + 1), need - 1, group, side_m);
    group.pop_back();
    if (found) return true;
  }
  return false;
}

}  // namespace

std::string_view flag_name(Flag flag) { return kFlagNames.at(static_cast<std::size_t>(flag)); }

std::optional<Flag> parse_flag(std::string_view name) {
  for (std::size_t i = 0; i < kFlagNames.size(); ++i) {
    if (kFlagNames[i] == name) return static_cast<Flag>(i);
  }
  return std::nullopt;
}

bool RuleVerdict::has(Flag flag) const { return detail(flag).has_value(); }

std::optional<double> RuleVerdict::detail(Flag flag) const {
  for (const FlagDetail& d : details_) {
    if (d.flag == flag) return d.measured;
  }
  return std::nullopt;
}

std::vector<Flag> RuleVerdict::flags() const {
  std::vector<Flag> out;
  out.reserve(details_.size());
  for (const FlagDetail& d : details_) out.push_back(d.flag);
  return out;
}

void RuleVerdict::raise(Flag flag, double measured) {
  if (has(flag)) return;
  auto pos = std::find_if(details_.begin(), details_.end(),
                          [flag](const FlagDetail& d) { return d.flag > flag; });
  details_.insert(pos, FlagDetail{flag, measured});
}

void RuleConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(frequent_window_s) || !positive(max_speed_m_per_s) ||
      !positive(rapidfire_side_m) || !positive(rapidfire_window_s) || rapidfire_count < 1 ||
      !positive(gps_radius_m)) {
    throw InvalidConfig("rule configuration values must be strictly positive");
  }
}

std::optional<double> rule_frequent(std::span<const PriorCheckin> history, VenueId venue,
                                    Seconds t, const RuleConfig& config) {
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    const double elapsed = static_cast<double>(t - it->t);
    if (elapsed >= config.frequent_window_s) break;
    if (it->valid && it->venue_id == venue) return elapsed;
  }
  return std::nullopt;
}

std::optional<double> rule_speed(const std::optional<PriorCheckin>& last_valid,
                                 geo::GeoPoint venue_location, Seconds t,
                                 const RuleConfig& config) {
  if (!last_valid) return std::nullopt;
  const double distance = geo::haversine_m(last_valid->venue_location, venue_location);
  const Seconds elapsed = t - last_valid->t;
  if (elapsed <= 0) {
    if (distance > 0.0) return std::numeric_limits<double>::infinity();
    return std::nullopt;
  }
  const double speed = distance / static_cast<double>(elapsed);
  if (speed > config.max_speed_m_per_s) return speed;
  return std::nullopt;
}

std::optional<double> rule_rapidfire(std::span<const PriorCheckin> recent,
                                     geo::GeoPoint candidate, const RuleConfig& config) {
  const auto need = static_cast<std::size_t>(std::max(config.rapidfire_count - 1, 0));
  if (recent.size() < need) return std::nullopt;
  // Anything farther than the square's diagonal cannot share it with the candidate.
  const double reach = config.rapidfire_side_m * std::sqrt(2.0);
  std::vector<geo::GeoPoint> pool;
  for (const PriorCheckin& c : recent) {
    if (c.valid && geo::haversine_m(candidate, c.venue_location) <= reach) {
      pool.push_back(c.venue_location);
    }
  }
  std::vector<geo::GeoPoint> group{candidate};
  if (find_group(pool, need, group, config.rapidfire_side_m)) {
    return static_cast<double>(recent.size() + 1);
  }
  return std::nullopt;
}

std::optional<double> rule_gps(geo::GeoPoint reported, geo::GeoPoint venue_location,
                               const RuleConfig& config) {
  const double offset = geo::haversine_m(reported, venue_location);
  if (offset > config.gps_radius_m) return offset;
  return std::nullopt;
}

std::vector<PriorCheckin> rapidfire_window(std::span<const PriorCheckin> history, Seconds t,
                                           const RuleConfig& config) {
  std::vector<PriorCheckin> out;
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (static_cast<double>(t - it->t) >= config.rapidfire_window_s) break;
    if (it->valid) out.push_back(*it);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::optional<PriorCheckin> last_valid(std::span<const PriorCheckin> history) {
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->valid) return *it;
  }
  return std::nullopt;
}

RuleVerdict evaluate(std::span<const PriorCheckin> history, const VenueRef& venue,
                     geo::GeoPoint reported_gps, Seconds t, const RuleConfig& config) {
  RuleVerdict verdict;
  if (auto v = rule_frequent(history, venue.id, t, config)) {
    verdict.raise(Flag::FrequentCheckin, *v);
  }
  if (auto v = rule_speed(last_valid(history), venue.location, t, config)) {
    verdict.raise(Flag::SuperHumanSpeed, *v);
  }
  const auto recent = rapidfire_window(history, t, config);
  if (auto v = rule_rapidfire(recent, venue.location, config)) {
    verdict.raise(Flag::RapidFire, *v);
  }
  if (auto v = rule_gps(reported_gps, venue.location, config)) {
    verdict.raise(Flag::GpsMismatch, *v);
  }
  return verdict;
}

Seconds history_horizon(Seconds t, const RuleConfig& config) {
  const double window = std::max(config.frequent_window_s, config.rapidfire_window_s);
  return t - static_cast<Seconds>(std::ceil(window));
}

}  // namespace checkin::anticheat
