#include "checkin/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <optional>

#include "checkin/analytics.hpp"
#include "checkin/attacker.hpp"
#include "checkin/config.hpp"
#include "checkin/csv.hpp"
#include "checkin/errors.hpp"
#include "checkin/scenario.hpp"
#include "checkin/tables.hpp"

namespace checkin::cli {
namespace {

namespace fs = std::filesystem;
using harness::ScenarioConfig;

std::vector<double> split_numbers(const std::string& text, std::size_t expected,
                                  const std::string& what) {
  const auto rows = csv::parse(text + "\n");
  std::vector<double> out;
  for (const auto& field : rows.at(0)) out.push_back(csv::parse_double(field));
  if (out.size() != expected) {
    throw InvalidConfig(what + " needs " + std::to_string(expected) + " comma-separated numbers");
  }
  return out;
}

geo::GeoPoint parse_point(const std::string& text) {
  const auto v = split_numbers(text, 2, "a point");
  return geo::GeoPoint::checked(v[0], v[1]);
}

double parse_bearing(const std::string& text) {
  static const std::pair<const char*, double> kNamed[] = {
      {"N", 0.0}, {"NE", 45.0}, {"E", 90.0}, {"SE", 135.0},
      {"S", 180.0}, {"SW", 225.0}, {"W", 270.0}, {"NW", 315.0}};
  for (const auto& [name, deg] : kNamed) {
    if (text == name) return deg;
  }
  return csv::parse_double(text);
}

// "N:556" or "45:1000": bearing then meters.
attacker::Step parse_step(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidConfig("step '" + text + "' is not bearing:meters");
  attacker::Step s;
  s.bearing_deg = parse_bearing(text.substr(0, colon));
  s.distance_m = csv::parse_double(text.substr(colon + 1));
  if (!(s.distance_m >= 0.0)) throw InvalidConfig("step distance must be non-negative");
  return s;
}

ScenarioConfig scenario_from(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                             const std::string& out_dir) {
  ScenarioConfig config = harness::load_scenario(config_path);
  if (seed) config.seed = *seed;
  if (!out_dir.empty()) config.output_dir = out_dir;
  return config;
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string in;
  std::string state;
  std::string schedule;
  std::string curves;
  // attack-plan
  bool sweep = false;
  bool require_special = false;
  bool require_vacant = false;
  std::string region;
  std::string name_filter;
  std::optional<std::size_t> limit;
  std::optional<std::uint32_t> victim;
  std::optional<std::uint32_t> tour_venue;
  std::size_t steps = 24;
  double step_deg = 0.005;
  std::vector<std::string> step_specs;
  std::optional<std::uint32_t> from_venue;
  std::string from_point;
  Seconds start_time = 0;
  std::uint32_t repeat_days = 1;
  std::string targets_out;
  // attack-exec
  std::optional<std::uint32_t> attacker_id;
  std::string true_location;
};

int cmd_generate(const Options& o, bool full, std::ostream& out) {
  const ScenarioConfig config = scenario_from(o.config, o.seed, o.out);
  harness::RunOptions run;
  run.attacks = full;
  run.analytics = full;
  const auto result = harness::run_scenario(config, run);
  const auto& m = result.metrics;
  out << "users " << m.users << " venues " << m.venues << " checkins " << m.total_checkins
      << " valid " << m.valid_checkins << " mayors " << m.mayors_count << '\n';
  if (full) {
    for (const auto& a : m.attackers) {
      out << "attacker " << a.name << " user " << raw(a.user_id) << " valid " << a.valid << "/"
          << a.submitted << " points " << a.points << " badges " << a.badges.size()
          << " mayorships " << a.mayorships << '\n';
    }
    out << "precision " << csv::format_fixed(m.detection.precision(), 4) << " recall "
        << csv::format_fixed(m.detection.recall(), 4) << '\n';
  }
  out << "outputs in " << config.output_dir.string() << '\n';
  return kExitOk;
}

int cmd_attack_plan(const Options& o, std::ostream& out) {
  const PublicTables tables = load_public_tables(o.in);
  const VenueIndex index = attacker::index_of(tables.venues);
  const int modes = int(o.sweep) + int(o.victim.has_value()) + int(o.tour_venue.has_value()) +
                    int(!o.step_specs.empty());
  if (modes != 1) {
    throw InvalidConfig("choose exactly one of --sweep, --victim, --tour-from, --step");
  }

  std::vector<attacker::PlannedVenue> path;
  std::vector<VenueId> targets;
  if (o.sweep || o.victim) {
    if (o.sweep) {
      attacker::TargetCriteria c;
      c.require_mayor_special = o.require_special;
      c.require_vacant_mayor = o.require_vacant;
      if (!o.region.empty()) {
        const auto b = split_numbers(o.region, 4, "--region");
        c.region = attacker::BoundingBox{b[0], b[1], b[2], b[3]};
      }
      if (!o.name_filter.empty()) c.name_filter = o.name_filter;
      targets = attacker::select_targets(tables.venues, c);
    } else {
      targets = attacker::plan_mayor_denial(UserId{*o.victim}, tables);
    }
    if (o.limit && targets.size() > *o.limit) targets.resize(*o.limit);
    path = attacker::order_by_proximity(attacker::resolve(targets, index));
  } else {
    geo::GeoPoint at;
    VenueId first{};
    if (o.tour_venue) {
      first = VenueId{*o.tour_venue};
    } else if (o.from_venue) {
      first = VenueId{*o.from_venue};
    } else if (!o.from_point.empty()) {
      first = *index.nearest(parse_point(o.from_point));
    } else {
      throw InvalidConfig("--step needs --from-venue or --from");
    }
    const IndexedVenue* v = index.find(first);
    if (v == nullptr) throw UnknownVenue("venue " + std::to_string(raw(first)) + " not in tables");
    at = v->location;
    std::vector<attacker::Step> steps;
    if (o.tour_venue) {
      steps = attacker::spiral_steps(at, o.steps, o.step_deg);
    } else {
      for (const auto& s : o.step_specs) steps.push_back(parse_step(s));
    }
    path.push_back({first, at});
    for (const auto& r : attacker::walk(at, steps, index)) {
      path.push_back({r.venue, r.venue_location});
      out << "step target " << csv::format_double(r.target.lat) << ","
          << csv::format_double(r.target.lon) << " -> venue " << raw(r.venue) << '\n';
    }
    for (const auto& p : path) targets.push_back(p.id);
  }

  const auto schedule = attacker::build_daily_schedule(path, o.start_time, o.repeat_days);
  const auto problems = attacker::schedule_violations(schedule, index);
  for (const auto& p : problems) out << "warning: " << p << '\n';
  attacker::write_schedule(schedule, o.out);
  if (!o.targets_out.empty()) attacker::write_target_list(targets, o.targets_out);
  out << "planned " << schedule.entries.size() << " check-ins at " << targets.size()
      << " venues\n";
  return kExitOk;
}

int cmd_attack_exec(const Options& o, std::ostream& out) {
  World world = World::load_state(o.state);
  const auto schedule = attacker::load_schedule(o.schedule);
  UserId user{};
  geo::GeoPoint true_loc;
  if (o.attacker_id) {
    user = UserId{*o.attacker_id};
    true_loc = o.true_location.empty() ? world.user(user).home : parse_point(o.true_location);
  } else {
    if (o.true_location.empty()) throw InvalidConfig("a new attacker needs --true-location");
    true_loc = parse_point(o.true_location);
    user = world.register_user(true_loc, true);
  }
  const auto records = attacker::execute(schedule, world, user, true_loc);
  std::size_t valid = 0;
  for (const auto& r : records) valid += r.valid() ? 1 : 0;
  world.settle_mayors(world.now());
  const fs::path dir = o.out;
  fs::create_directories(dir);
  world.save_state(dir / "state.bin");
  export_public_profiles(world, dir / "exports");
  write_event_log(event_rows(world), dir / "exports" / kEventsFile);
  const UserProfile& u = world.user(user);
  out << "attacker " << raw(user) << " valid " << valid << "/" << records.size() << " points "
      << u.points() << " badges " << u.badges().size() << " mayorships " << u.total_mayorships
      << '\n';
  return kExitOk;
}

int cmd_detect(const Options& o, std::ostream& out) {
  analytics::Thresholds thresholds;
  if (!o.config.empty()) thresholds = harness::load_scenario(o.config).thresholds;
  const fs::path in = o.in;
  const PublicTables tables = load_public_tables(in);
  const auto events = load_event_log(in / kEventsFile);
  const auto report = analytics::build_report(tables, events, thresholds);
  analytics::write_report_csv(report, o.out);
  if (!o.curves.empty()) {
    const fs::path dir = o.curves;
    fs::create_directories(dir);
    analytics::write_curve_csv(analytics::compute_recent_ratio_curve(tables, thresholds),
                               "recent_ratio", dir / "curve_recent_ratio.csv");
    analytics::write_curve_csv(analytics::compute_badge_curve(tables), "badges",
                               dir / "curve_badges.csv");
  }
  std::size_t flagged = 0;
  for (const auto& r : report) flagged += r.suspicious() ? 1 : 0;
  out << "flagged " << flagged << " of " << report.size() << " users\n";
  return kExitOk;
}

int cmd_verify_replay(const Options& o, std::ostream& out, std::ostream& err) {
  World world = World::load_state(o.state);
  const auto problems = world.check_invariants();
  for (const auto& v : problems) err << "invariant: " << v << '\n';
  World replayed = World::replay(world);
  world.settle_mayors(world.now());
  replayed.settle_mayors(world.now());
  if (!(replayed == world) || !problems.empty()) {
    err << "replay differs from snapshot\n";
    return kExitRuntime;
  }
  out << "replay matches snapshot (" << world.events().size() << " check-ins)\n";
  return kExitOk;
}

int cmd_export(const Options& o, std::ostream& out) {
  const World world = World::load_state(o.state);
  const fs::path dir = o.out;
  export_public_profiles(world, dir);
  write_event_log(event_rows(world), dir / kEventsFile);
  out << "exported " << world.users().size() << " users and " << world.venues().size()
      << " venues\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Location check-in service simulator", "checkin-sim"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Override the scenario seed");
  };

  auto* generate = app.add_subcommand("generate", "Generate a population and its activity");
  generate->add_option("--config", o.config, "Scenario JSON")->required();
  generate->add_option("--out", o.out, "Output directory");
  add_common(generate);

  auto* run_cmd = app.add_subcommand("run", "Run a full scenario with attacks and analytics");
  run_cmd->add_option("--config", o.config, "Scenario JSON")->required();
  run_cmd->add_option("--out", o.out, "Output directory");
  add_common(run_cmd);

  auto* plan = app.add_subcommand("attack-plan", "Plan a rule-evading check-in schedule");
  plan->add_option("--in", o.in, "Directory with exported public tables")->required();
  plan->add_option("--out", o.out, "Schedule file (JSONL)")->required();
  plan->add_option("--start-time", o.start_time, "First check-in time");
  plan->add_flag("--sweep", o.sweep, "Target venues matching the criteria");
  plan->add_flag("--require-special", o.require_special, "Only venues with a mayor special");
  plan->add_flag("--require-vacant", o.require_vacant, "Only venues without a mayor");
  plan->add_option("--region", o.region, "min_lat,max_lat,min_lon,max_lon");
  plan->add_option("--name", o.name_filter, "Venue name substring");
  plan->add_option("--limit", o.limit, "Maximum number of targets");
  plan->add_option("--victim", o.victim, "Deny this user's mayorships");
  plan->add_option("--tour-from", o.tour_venue, "Spiral tour starting at this venue");
  plan->add_option("--steps", o.steps, "Spiral tour steps");
  plan->add_option("--step-deg", o.step_deg, "Spiral step in degrees");
  plan->add_option("--step", o.step_specs, "Manual step bearing:meters, e.g. N:556");
  plan->add_option("--from-venue", o.from_venue, "Start venue for manual steps");
  plan->add_option("--from", o.from_point, "Start point lat,lon for manual steps");
  plan->add_option("--repeat-days", o.repeat_days, "Passes over the targets, one per day")
      ->check(CLI::PositiveNumber);
  plan->add_option("--targets-out", o.targets_out, "Also write the target list CSV");
  add_common(plan);

  auto* exec = app.add_subcommand("attack-exec", "Execute a schedule against a saved world");
  exec->add_option("--state", o.state, "World snapshot")->required();
  exec->add_option("--schedule", o.schedule, "Schedule file (JSONL)")->required();
  exec->add_option("--attacker", o.attacker_id, "Existing attacker user id");
  exec->add_option("--true-location", o.true_location, "Device position lat,lon");
  exec->add_option("--out", o.out, "Output directory")->required();
  add_common(exec);

  auto* detect = app.add_subcommand("detect", "Run cheater detection over exports");
  detect->add_option("--in", o.in, "Directory with exports and events.jsonl")->required();
  detect->add_option("--out", o.out, "Report CSV")->required();
  detect->add_option("--config", o.config, "Scenario JSON for analytics thresholds");
  detect->add_option("--curves", o.curves, "Directory for curve CSVs");
  add_common(detect);

  auto* replay = app.add_subcommand("verify-replay", "Replay a snapshot's event log and compare");
  replay->add_option("--state", o.state, "World snapshot")->required();
  add_common(replay);

  auto* exp = app.add_subcommand("export", "Export public tables from a snapshot");
  exp->add_option("--state", o.state, "World snapshot")->required();
  exp->add_option("--out", o.out, "Output directory")->required();
  add_common(exp);

  std::vector<const char*> argv{"checkin-sim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(o, false, out);
    if (run_cmd->parsed()) return cmd_generate(o, true, out);
    if (plan->parsed()) return cmd_attack_plan(o, out);
    if (exec->parsed()) return cmd_attack_exec(o, out);
    if (detect->parsed()) return cmd_detect(o, out);
    if (replay->parsed()) return cmd_verify_replay(o, out, err);
    if (exp->parsed()) return cmd_export(o, out);
  } catch (const InvalidConfig& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace checkin::cli
