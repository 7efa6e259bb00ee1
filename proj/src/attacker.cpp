#include "checkin/attacker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include <json.hpp>

#include "checkin/anticheat.hpp"
#include "checkin/csv.hpp"
#include "checkin/errors.hpp"

namespace checkin::attacker {

std::vector<VenueId> select_targets(std::span<const VenueRow> venues,
                                    const TargetCriteria& criteria) {
  std::vector<VenueId> out;
  for (const VenueRow& v : venues) {
    if (criteria.require_mayor_special && !v.has_mayor_special) continue;
    if (criteria.require_vacant_mayor && v.mayor_id) continue;
    if (criteria.region && !criteria.region->contains(v.location)) continue;
    if (criteria.name_filter && v.name.find(*criteria.name_filter) == std::string::npos) continue;
    out.push_back(v.venue_id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

VenueId plan_step(geo::GeoPoint current, double bearing_deg, double step_m,
                  const VenueIndex& index) {
  if (index.empty()) throw NoVenuesAvailable("no venues to step to");
  const geo::GeoPoint target = geo::offset_point(current, bearing_deg, step_m);
  return *index.nearest(target);
}

std::vector<StepResult> walk(geo::GeoPoint start, std::span<const Step> steps,
                             const VenueIndex& index) {
  if (index.empty()) throw NoVenuesAvailable("no venues to step to");
  std::vector<StepResult> out;
  geo::GeoPoint at = start;
  for (const Step& s : steps) {
    StepResult r;
    r.target = geo::offset_point(at, s.bearing_deg, s.distance_m);
    r.venue = *index.nearest(r.target);
    r.venue_location = index.find(r.venue)->location;
    at = r.venue_location;
    out.push_back(r);
  }
  return out;
}

double degree_step_m(geo::GeoPoint at, double bearing_deg, double step_deg) {
  const double b = std::fmod(std::fmod(bearing_deg, 360.0) + 360.0, 360.0);
  const bool east_west = std::abs(b - 90.0) < 45.0 || std::abs(b - 270.0) < 45.0;
  const double k = step_deg * geo::meters_per_degree();
  return east_west ? k * std::cos(at.lat * std::numbers::pi / 180.0) : k;
}

std::vector<Step> spiral_steps(geo::GeoPoint start, std::size_t count, double step_deg) {
  static constexpr double kBearings[] = {0.0, 90.0, 180.0, 270.0};
  std::vector<Step> out;
  std::size_t leg = 0;
  while (out.size() < count) {
    const std::size_t length = leg / 2 + 1;
    const double bearing = kBearings[leg % 4];
    for (std::size_t i = 0; i < length && out.size() < count; ++i) {
      out.push_back(Step{bearing, degree_step_m(start, bearing, step_deg)});
    }
    ++leg;
  }
  return out;
}

Seconds interval_for(double distance_m) {
  const double miles = distance_m / geo::kMetersPerMile;
  if (miles <= 1.0) return kBaseInterval;
  return static_cast<Seconds>(std::ceil(miles * static_cast<double>(kBaseInterval) - 1e-9));
}

AttackSchedule build_schedule(std::span<const PlannedVenue> venues, Seconds start_time) {
  const double max_speed = anticheat::RuleConfig{}.max_speed_m_per_s;
  AttackSchedule schedule;
  std::map<VenueId, Seconds> last_visit;
  for (std::size_t i = 0; i < venues.size(); ++i) {
    Seconds fire = start_time;
    if (i > 0) {
      const double d = geo::haversine_m(venues[i - 1].location, venues[i].location);
      const Seconds prev = schedule.entries.back().fire_time;
      Seconds dt = interval_for(d);
      while (d / static_cast<double>(dt) > max_speed) ++dt;
      fire = prev + dt;
      if (auto it = last_visit.find(venues[i].id); it != last_visit.end()) {
        fire = std::max(fire, it->second + kRevisitInterval);
      }
    }
    last_visit[venues[i].id] = fire;
    schedule.entries.push_back({venues[i].id, fire});
  }
  return schedule;
}

namespace {

Seconds paced_interval(double distance_m, double max_speed) {
  Seconds dt = interval_for(distance_m);
  while (distance_m / static_cast<double>(dt) > max_speed) ++dt;
  return dt;
}

}  // namespace

AttackSchedule build_daily_schedule(std::span<const PlannedVenue> venues, Seconds start_time,
                                    std::uint32_t days) {
  const double max_speed = anticheat::RuleConfig{}.max_speed_m_per_s;
  AttackSchedule all;
  if (venues.empty()) return all;
  Seconds pass_start = start_time;
  for (std::uint32_t k = 0; k < days; ++k) {
    if (k > 0) {
      const ScheduleEntry& last = all.entries.back();
      const double back = geo::haversine_m(venues.back().location, venues.front().location);
      pass_start = std::max(pass_start + kSecondsPerDay,
                            last.fire_time + paced_interval(back, max_speed));
    }
    const AttackSchedule pass = build_schedule(venues, pass_start);
    all.entries.insert(all.entries.end(), pass.entries.begin(), pass.entries.end());
  }
  return all;
}

std::vector<PlannedVenue> order_by_proximity(std::vector<PlannedVenue> venues) {
  std::vector<PlannedVenue> out;
  out.reserve(venues.size());
  if (venues.empty()) return out;
  std::vector<bool> used(venues.size(), false);
  std::size_t at = 0;
  for (std::size_t step = 0; step < venues.size(); ++step) {
    used[at] = true;
    out.push_back(venues[at]);
    std::size_t next = venues.size();
    double best = 0.0;
    for (std::size_t j = 0; j < venues.size(); ++j) {
      if (used[j]) continue;
      const double d = geo::haversine_m(venues[at].location, venues[j].location);
      if (next == venues.size() || d < best) {
        best = d;
        next = j;
      }
    }
    at = next;
  }
  return out;
}

std::vector<std::string> schedule_violations(const AttackSchedule& schedule,
                                             const VenueIndex& venues) {
  std::vector<std::string> problems;
  std::map<VenueId, Seconds> last_visit;
  for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
    const ScheduleEntry& e = schedule.entries[i];
    const IndexedVenue* v = venues.find(e.venue_id);
    if (v == nullptr) {
      problems.push_back("entry " + std::to_string(i) + ": unknown venue");
      continue;
    }
    if (i > 0) {
      const ScheduleEntry& p = schedule.entries[i - 1];
      const IndexedVenue* pv = venues.find(p.venue_id);
      const Seconds dt = e.fire_time - p.fire_time;
      if (dt <= 0) problems.push_back("entry " + std::to_string(i) + ": time not increasing");
      if (pv != nullptr && dt < interval_for(geo::haversine_m(pv->location, v->location))) {
        problems.push_back("entry " + std::to_string(i) + ": interval shorter than distance rule");
      }
    }
    if (auto it = last_visit.find(e.venue_id);
        it != last_visit.end() && e.fire_time - it->second < kRevisitInterval) {
      problems.push_back("entry " + std::to_string(i) + ": revisit within an hour");
    }
    last_visit[e.venue_id] = e.fire_time;
  }
  return problems;
}

std::vector<CheckInRecord> execute(const AttackSchedule& schedule, World& world,
                                   UserId attacker, geo::GeoPoint true_location) {
  std::vector<CheckInRecord> out;
  out.reserve(schedule.entries.size());
  for (const ScheduleEntry& e : schedule.entries) {
    const geo::GeoPoint spoofed = world.venue(e.venue_id).location;
    out.push_back(world.submit_checkin(attacker, e.venue_id, spoofed, true_location, e.fire_time));
  }
  return out;
}

std::vector<VenueId> plan_mayor_denial(UserId victim, const PublicTables& tables) {
  const bool known = std::any_of(tables.users.begin(), tables.users.end(),
                                 [victim](const UserRow& u) { return u.user_id == victim; });
  if (!known) throw UnknownVictim("no public profile for user " + std::to_string(raw(victim)));
  std::vector<VenueId> out;
  for (const VenueRow& v : tables.venues) {
    if (v.mayor_id == victim) out.push_back(v.venue_id);
  }
  for (const RecentRow& r : tables.recent) {
    if (r.user_id == victim) out.push_back(r.venue_id);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<PlannedVenue> resolve(std::span<const VenueId> ids, const VenueIndex& venues) {
  std::vector<PlannedVenue> out;
  out.reserve(ids.size());
  for (VenueId id : ids) {
    const IndexedVenue* v = venues.find(id);
    if (v == nullptr) throw UnknownVenue("unknown venue " + std::to_string(raw(id)));
    out.push_back({id, v->location});
  }
  return out;
}

VenueIndex index_of(const World& world) {
  std::vector<IndexedVenue> items;
  items.reserve(world.venues().size());
  for (const Venue& v : world.venues()) items.push_back({v.id, v.location});
  return VenueIndex(std::move(items));
}

VenueIndex index_of(std::span<const VenueRow> venues) {
  std::vector<IndexedVenue> items;
  items.reserve(venues.size());
  for (const VenueRow& v : venues) items.push_back({v.venue_id, v.location});
  return VenueIndex(std::move(items));
}

void write_schedule(const AttackSchedule& schedule, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  for (const ScheduleEntry& e : schedule.entries) {
    out << "{\"venue_id\":" << raw(e.venue_id) << ",\"fire_time\":" << e.fire_time << "}\n";
  }
  if (!out) throw IoFailure("write failed for " + path.string());
}

AttackSchedule load_schedule(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  AttackSchedule schedule;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      schedule.entries.push_back({VenueId{j.at("venue_id").get<std::uint32_t>()},
                                  j.at("fire_time").get<Seconds>()});
    } catch (const nlohmann::json::exception& e) {
      throw IoFailure(path.string() + ": " + e.what());
    }
  }
  return schedule;
}

void write_target_list(std::span<const VenueId> ids, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out << "venue_id\n";
  for (VenueId id : ids) out << raw(id) << '\n';
  if (!out) throw IoFailure("write failed for " + path.string());
}

std::vector<VenueId> load_target_list(const std::filesystem::path& path) {
  std::vector<VenueId> out;
  for (const csv::Row& r : csv::read_table(path, {"venue_id"})) {
    out.push_back(VenueId{static_cast<std::uint32_t>(csv::parse_uint(r[0]))});
  }
  return out;
}

}  // namespace checkin::attacker
