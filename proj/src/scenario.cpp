#include "checkin/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <queue>

#include "checkin/attacker.hpp"
#include "checkin/errors.hpp"
#include "checkin/spatial_index.hpp"
#include "checkin/tables.hpp"

namespace checkin::harness {
namespace {

namespace fs = std::filesystem;

struct AttackState {
  const AttackScript* script = nullptr;
  UserId user{};
  attacker::AttackSchedule schedule;
};

enum class EventKind : std::uint8_t { Activate, Fire };

struct Pending {
  Seconds t = 0;
  EventKind kind = EventKind::Fire;
  std::uint64_t seq = 0;
  std::size_t attack = 0;
  VenueId venue{};

  bool operator>(const Pending& o) const {
    if (t != o.t) return t > o.t;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

std::string day_dir(std::uint64_t day) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "day_%04llu", static_cast<unsigned long long>(day));
  return buf;
}

void write_exports(const World& world, const fs::path& dir) {
  export_public_profiles(world, dir);
  write_event_log(event_rows(world), dir / kEventsFile);
}

attacker::AttackSchedule plan_attack(const AttackScript& a, World& world, Seconds now) {
  switch (a.kind) {
    case AttackKind::Tour: {
      const VenueIndex index = attacker::index_of(world);
      if (index.empty()) throw NoVenuesAvailable("tour " + a.name + " has no venues");
      const VenueId first = a.start_venue ? *a.start_venue : *index.nearest(*a.start_point);
      const geo::GeoPoint at = index.find(first)->location;
      const auto steps = attacker::spiral_steps(at, a.steps, a.step_deg);
      std::vector<attacker::PlannedVenue> path{{first, at}};
      for (const auto& r : attacker::walk(at, steps, index)) {
        path.push_back({r.venue, r.venue_location});
      }
      return attacker::build_schedule(path, now);
    }
    case AttackKind::VacancySweep:
    case AttackKind::MayorDenial: {
      const PublicTables tables = public_tables(world);
      auto targets = a.kind == AttackKind::VacancySweep
                         ? attacker::select_targets(tables.venues, a.criteria)
                         : attacker::plan_mayor_denial(a.victim, tables);
      if (a.limit && targets.size() > *a.limit) targets.resize(*a.limit);
      const VenueIndex index = attacker::index_of(world);
      const auto path = attacker::order_by_proximity(attacker::resolve(targets, index));
      return attacker::build_daily_schedule(path, now, a.repeat_days);
    }
    case AttackKind::Schedule: {
      for (const auto& e : a.schedule.entries) {
        if (e.fire_time < now) {
          throw InvalidConfig("attack " + a.name + " schedules a check-in before its start time");
        }
      }
      return a.schedule;
    }
  }
  return {};
}

void write_json(const nlohmann::ordered_json& doc, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoFailure("write failed for " + path.string());
}

double ratio(std::uint64_t num, std::uint64_t den, double empty) {
  return den == 0 ? empty : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double DetectionMetrics::precision() const {
  return ratio(true_positives, true_positives + false_positives, 1.0);
}

double DetectionMetrics::recall() const {
  return ratio(true_positives, true_positives + false_negatives, 1.0);
}

double DetectionMetrics::false_positive_rate() const {
  return ratio(false_positives, false_positives + true_negatives, 0.0);
}

nlohmann::ordered_json to_json(const RunMetrics& m) {
  nlohmann::ordered_json doc;
  doc["users"] = m.users;
  doc["venues"] = m.venues;
  doc["cheaters"] = m.cheaters;
  doc["total_checkins"] = m.total_checkins;
  doc["valid_checkins"] = m.valid_checkins;
  doc["invalid_checkins"] = m.invalid_checkins;
  nlohmann::ordered_json flags = nlohmann::ordered_json::object();
  for (const auto& [name, count] : m.invalid_by_flag) flags[name] = count;
  doc["invalid_by_flag"] = flags;
  doc["mayors_count"] = m.mayors_count;
  static constexpr const char* kTierNames[kTierCount] = {"zero", "low", "mid", "heavy", "top"};
  nlohmann::ordered_json tiers;
  for (std::size_t i = 0; i < kTierCount; ++i) tiers[kTierNames[i]] = m.tier_shares[i];
  doc["tier_shares"] = tiers;
  nlohmann::ordered_json attackers = nlohmann::ordered_json::array();
  for (const auto& a : m.attackers) {
    attackers.push_back({{"name", a.name},
                         {"user_id", raw(a.user_id)},
                         {"submitted", a.submitted},
                         {"valid", a.valid},
                         {"points", a.points},
                         {"badges", a.badges},
                         {"mayorships", a.mayorships}});
  }
  doc["attackers"] = attackers;
  const DetectionMetrics& d = m.detection;
  doc["detection"] = {{"true_positives", d.true_positives},
                      {"false_positives", d.false_positives},
                      {"false_negatives", d.false_negatives},
                      {"true_negatives", d.true_negatives},
                      {"precision", d.precision()},
                      {"recall", d.recall()},
                      {"false_positive_rate", d.false_positive_rate()}};
  return doc;
}

RunMetrics compute_metrics(const World& world, std::span<const analytics::SuspicionReport> report,
                           const TierBounds& tiers) {
  RunMetrics m;
  m.users = world.users().size();
  m.venues = world.venues().size();
  for (const CheckInRecord& r : world.events()) {
    ++m.total_checkins;
    if (r.valid()) {
      ++m.valid_checkins;
      continue;
    }
    ++m.invalid_checkins;
    for (const auto& d : r.verdict.details()) {
      ++m.invalid_by_flag[std::string(anticheat::flag_name(d.flag))];
    }
  }
  for (const Venue& v : world.venues()) {
    if (world.mayor_on_read(v.id)) ++m.mayors_count;
  }
  std::array<std::uint64_t, kTierCount> counts{};
  for (const UserProfile& u : world.users()) {
    if (u.is_cheater_ground_truth) ++m.cheaters;
    ++counts[static_cast<std::size_t>(tier_of(u.total_checkins, tiers))];
  }
  for (std::size_t i = 0; i < kTierCount; ++i) m.tier_shares[i] = ratio(counts[i], m.users, 0.0);
  for (const auto& r : report) {
    const bool cheater = world.user(r.user_id).is_cheater_ground_truth;
    if (r.suspicious()) {
      ++(cheater ? m.detection.true_positives : m.detection.false_positives);
    } else {
      ++(cheater ? m.detection.false_negatives : m.detection.true_negatives);
    }
  }
  return m;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  const Seconds start = config.start_time;
  const Seconds end = start + static_cast<Seconds>(config.duration_days) * kSecondsPerDay;
  const fs::path out = config.output_dir;

  ScenarioResult result{World(config.world, config.seed), {}, {}, {}};
  World& world = result.world;
  world.advance_clock(start);

  for (const auto& v : config.venues) world.register_venue(v.name, v.location, v.has_mayor_special);
  std::vector<PlannedCheckin> planned;
  for (const auto& u : config.users) {
    const UserId id = world.register_user(u.home);
    for (const auto& c : u.checkins) planned.push_back({c.t, id, c.venue_id, {}, {}});
  }
  result.population = generate_population(config.population, world, start, end, config.seed);
  for (auto& p : planned) {
    if (!world.has_venue(p.venue)) {
      throw InvalidConfig("scripted check-in references unknown venue " +
                          std::to_string(raw(p.venue)));
    }
    p.reported = p.true_gps = world.venue(p.venue).location;
  }
  if (!planned.empty()) {
    planned.insert(planned.end(), result.population.checkins.begin(),
                   result.population.checkins.end());
    std::stable_sort(planned.begin(), planned.end(),
                     [](const PlannedCheckin& a, const PlannedCheckin& b) { return a.t < b.t; });
  } else {
    planned = result.population.checkins;
  }

  for (auto r : config.routers) {
    r.location = world.venue(r.venue_id).location;
    world.register_router(r);
  }
  if (config.router_all_venues) {
    for (const Venue& v : world.venues()) {
      auto r = *config.router_all_venues;
      r.venue_id = v.id;
      r.location = v.location;
      world.register_router(r);
    }
  }

  std::vector<AttackState> attacks;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
  std::uint64_t seq = 0;
  if (options.attacks) {
    for (std::size_t i = 0; i < config.attacks.size(); ++i) {
      const AttackScript& a = config.attacks[i];
      attacks.push_back({&a, world.register_user(a.true_location, true), {}});
      queue.push({std::max(start, a.start_time), EventKind::Activate, seq++, i, {}});
    }
  }

  const Seconds snapshot_step =
      static_cast<Seconds>(config.snapshot_every_days) * kSecondsPerDay;
  Seconds next_snapshot = snapshot_step > 0 ? start + snapshot_step : end;
  auto snapshots_before = [&](Seconds t) {
    while (snapshot_step > 0 && next_snapshot <= t && next_snapshot < end) {
      world.settle_mayors(next_snapshot);
      export_public_profiles(world, out / "exports" / day_dir((next_snapshot - start) / kSecondsPerDay));
      next_snapshot += snapshot_step;
    }
  };

  std::size_t next_planned = 0;
  while (next_planned < planned.size() || !queue.empty()) {
    const bool take_planned =
        next_planned < planned.size() && (queue.empty() || planned[next_planned].t <= queue.top().t);
    if (take_planned) {
      const PlannedCheckin& p = planned[next_planned++];
      snapshots_before(p.t);
      world.submit_checkin(p.user, p.venue, p.reported, p.true_gps, p.t);
      continue;
    }
    const Pending e = queue.top();
    queue.pop();
    snapshots_before(e.t);
    AttackState& a = attacks[e.attack];
    if (e.kind == EventKind::Activate) {
      world.advance_clock(std::max(world.now(), e.t));
      a.schedule = plan_attack(*a.script, world, e.t);
      fs::create_directories(out / "attacks");
      attacker::write_schedule(a.schedule, out / "attacks" / (a.script->name + ".jsonl"));
      for (const auto& entry : a.schedule.entries) {
        queue.push({entry.fire_time, EventKind::Fire, seq++, e.attack, entry.venue_id});
      }
    } else {
      world.submit_checkin(a.user, e.venue, world.venue(e.venue).location,
                           a.script->true_location, e.t);
    }
  }
  snapshots_before(end);

  const Seconds final_t = std::max(end, world.now());
  world.settle_mayors(final_t);
  const fs::path exports = out / "exports";
  write_exports(world, exports);
  if (config.save_state) world.save_state(out / "state.bin");

  if (options.analytics) {
    const PublicTables tables = load_public_tables(exports);
    const auto events = load_event_log(exports / kEventsFile);
    analytics::Thresholds thresholds = config.thresholds;
    if (!thresholds.observed_at) thresholds.observed_at = final_t;
    result.report = analytics::build_report(tables, events, thresholds);
    analytics::write_report_csv(result.report, out / "report.csv");
    analytics::write_curve_csv(analytics::compute_recent_ratio_curve(tables, thresholds),
                               "recent_ratio", out / "curve_recent_ratio.csv");
    analytics::write_curve_csv(analytics::compute_badge_curve(tables), "badges",
                               out / "curve_badges.csv");
  }

  result.metrics = compute_metrics(world, result.report, config.population.tiers);
  for (const AttackState& a : attacks) {
    AttackerMetrics am;
    am.name = a.script->name;
    am.user_id = a.user;
    const UserProfile& u = world.user(a.user);
    am.submitted = u.total_checkins;
    am.valid = u.valid_checkins;
    am.points = u.points();
    am.badges = u.badges();
    am.mayorships = u.total_mayorships;
    result.metrics.attackers.push_back(std::move(am));
  }
  write_json(to_json(result.metrics), out / "metrics.json");
  return result;
}

}  // namespace checkin::harness
