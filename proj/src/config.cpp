#include "checkin/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "checkin/errors.hpp"

namespace checkin::harness {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                std::string_view where) {
  if (!obj.is_object()) throw InvalidConfig(std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidConfig("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <class T>
void read(const json& obj, const char* key, std::optional<T>& out) {
  if (obj.contains(key) && !obj.at(key).is_null()) out = obj.at(key).get<T>();
}

geo::GeoPoint parse_point(const json& obj, std::string_view where) {
  check_keys(obj, {"lat", "lon"}, where);
  return geo::GeoPoint::checked(obj.at("lat").get<double>(), obj.at("lon").get<double>());
}

attacker::BoundingBox parse_box(const json& obj) {
  check_keys(obj, {"min_lat", "max_lat", "min_lon", "max_lon"}, "region");
  attacker::BoundingBox b;
  b.min_lat = obj.at("min_lat").get<double>();
  b.max_lat = obj.at("max_lat").get<double>();
  b.min_lon = obj.at("min_lon").get<double>();
  b.max_lon = obj.at("max_lon").get<double>();
  if (!(b.min_lat <= b.max_lat && b.min_lon <= b.max_lon) || !geo::GeoPoint{b.min_lat, b.min_lon}.is_valid() ||
      !geo::GeoPoint{b.max_lat, b.max_lon}.is_valid()) {
    throw InvalidConfig("region bounds are not a valid box");
  }
  return b;
}

double integral_power(double lo, double hi, double alpha) {
  if (std::abs(alpha - 1.0) < 1e-12) return std::log(hi / lo);
  return (std::pow(hi, 1.0 - alpha) - std::pow(lo, 1.0 - alpha)) / (1.0 - alpha);
}

PopulationConfig parse_population(const json& obj) {
  check_keys(obj,
             {"n_users", "n_venues", "seed", "activity", "tiers", "power_law_alpha",
              "cheater_fraction", "cheater_strategy", "special_fraction", "mayor_only_share",
              "region", "n_cities", "city_sigma_m", "home_sigma_m", "neighborhood_radius_m",
              "favorite_venues", "gps_noise_m", "registration_rate_per_day"},
             "population");
  PopulationConfig p;
  read(obj, "n_users", p.n_users);
  read(obj, "n_venues", p.n_venues);
  read(obj, "seed", p.seed);
  if (obj.contains("activity")) {
    const json& a = obj.at("activity");
    check_keys(a, {"zero", "low", "mid", "heavy", "top"}, "population.activity");
    read(a, "zero", p.activity.zero);
    read(a, "low", p.activity.low);
    read(a, "mid", p.activity.mid);
    read(a, "heavy", p.activity.heavy);
    read(a, "top", p.activity.top);
  }
  if (obj.contains("tiers")) {
    const json& t = obj.at("tiers");
    check_keys(t,
               {"low_min", "low_max", "mid_min", "mid_max", "heavy_min", "heavy_max", "top_min",
                "top_max"},
               "population.tiers");
    read(t, "low_min", p.tiers.low_min);
    read(t, "low_max", p.tiers.low_max);
    read(t, "mid_min", p.tiers.mid_min);
    read(t, "mid_max", p.tiers.mid_max);
    read(t, "heavy_min", p.tiers.heavy_min);
    read(t, "heavy_max", p.tiers.heavy_max);
    read(t, "top_min", p.tiers.top_min);
    read(t, "top_max", p.tiers.top_max);
  }
  read(obj, "power_law_alpha", p.power_law_alpha);
  read(obj, "cheater_fraction", p.cheater_fraction);
  if (obj.contains("cheater_strategy")) {
    const auto s = obj.at("cheater_strategy").get<std::string>();
    if (s == "naive_teleport") p.cheater_strategy = CheaterStrategy::NaiveTeleport;
    else if (s == "scheduled_evader") p.cheater_strategy = CheaterStrategy::ScheduledEvader;
    else throw InvalidConfig("unknown cheater_strategy '" + s + "'");
  }
  read(obj, "special_fraction", p.special_fraction);
  read(obj, "mayor_only_share", p.mayor_only_share);
  if (obj.contains("region")) p.region = parse_box(obj.at("region"));
  read(obj, "n_cities", p.n_cities);
  read(obj, "city_sigma_m", p.city_sigma_m);
  read(obj, "home_sigma_m", p.home_sigma_m);
  read(obj, "neighborhood_radius_m", p.neighborhood_radius_m);
  read(obj, "favorite_venues", p.favorite_venues);
  read(obj, "gps_noise_m", p.gps_noise_m);
  read(obj, "registration_rate_per_day", p.registration_rate_per_day);
  return p;
}

attacker::TargetCriteria parse_criteria(const json& obj) {
  check_keys(obj, {"require_mayor_special", "require_vacant_mayor", "region", "name_filter"},
             "criteria");
  attacker::TargetCriteria c;
  read(obj, "require_mayor_special", c.require_mayor_special);
  read(obj, "require_vacant_mayor", c.require_vacant_mayor);
  if (obj.contains("region")) c.region = parse_box(obj.at("region"));
  read(obj, "name_filter", c.name_filter);
  return c;
}

AttackScript parse_attack(const json& obj, std::size_t index) {
  check_keys(obj,
             {"name", "kind", "true_location", "start_time", "start_venue", "start", "steps",
              "step_deg", "criteria", "limit", "victim_user_id", "repeat_days", "entries"},
             "attacks[]");
  AttackScript a;
  a.name = "attack" + std::to_string(index + 1);
  read(obj, "name", a.name);
  const auto kind = obj.at("kind").get<std::string>();
  if (kind == "tour") a.kind = AttackKind::Tour;
  else if (kind == "vacancy_sweep") a.kind = AttackKind::VacancySweep;
  else if (kind == "mayor_denial") a.kind = AttackKind::MayorDenial;
  else if (kind == "schedule") a.kind = AttackKind::Schedule;
  else throw InvalidConfig("unknown attack kind '" + kind + "'");
  a.true_location = parse_point(obj.at("true_location"), "true_location");
  read(obj, "start_time", a.start_time);
  if (obj.contains("start_venue")) a.start_venue = VenueId{obj.at("start_venue").get<std::uint32_t>()};
  if (obj.contains("start")) a.start_point = parse_point(obj.at("start"), "start");
  read(obj, "steps", a.steps);
  read(obj, "step_deg", a.step_deg);
  if (obj.contains("criteria")) a.criteria = parse_criteria(obj.at("criteria"));
  read(obj, "limit", a.limit);
  if (obj.contains("victim_user_id")) a.victim = UserId{obj.at("victim_user_id").get<std::uint32_t>()};
  read(obj, "repeat_days", a.repeat_days);
  if (obj.contains("entries")) {
    for (const json& e : obj.at("entries")) {
      check_keys(e, {"venue_id", "fire_time"}, "entries[]");
      a.schedule.entries.push_back(
          {VenueId{e.at("venue_id").get<std::uint32_t>()}, e.at("fire_time").get<Seconds>()});
    }
  }
  if (a.kind == AttackKind::Tour && !a.start_venue && !a.start_point) {
    throw InvalidConfig("tour attack needs start_venue or start");
  }
  if (a.kind == AttackKind::MayorDenial && raw(a.victim) == 0) {
    throw InvalidConfig("mayor_denial attack needs victim_user_id");
  }
  if (a.repeat_days < 1) throw InvalidConfig("repeat_days must be >= 1");
  return a;
}

analytics::Thresholds parse_thresholds(const json& obj) {
  check_keys(obj,
             {"badge_min_checkins", "badge_max_badges", "max_daily_rate", "travel_speed_m_per_s",
              "cluster_radius_m", "min_clusters", "curve_max_total", "registration_rate_per_day",
              "launch_time", "observed_at"},
             "analytics");
  analytics::Thresholds t;
  read(obj, "badge_min_checkins", t.badge_min_checkins);
  read(obj, "badge_max_badges", t.badge_max_badges);
  read(obj, "max_daily_rate", t.max_daily_rate);
  read(obj, "travel_speed_m_per_s", t.travel_speed_m_per_s);
  read(obj, "cluster_radius_m", t.cluster_radius_m);
  read(obj, "min_clusters", t.min_clusters);
  read(obj, "curve_max_total", t.curve_max_total);
  read(obj, "registration_rate_per_day", t.age.registration_rate_per_day);
  read(obj, "launch_time", t.age.launch_time);
  read(obj, "observed_at", t.observed_at);
  return t;
}

verify::RouterRegistration parse_router(const json& obj, bool needs_venue) {
  check_keys(obj, {"venue_id", "range_m", "processing_delay_s"}, "routers[]");
  verify::RouterRegistration r;
  if (needs_venue) r.venue_id = VenueId{obj.at("venue_id").get<std::uint32_t>()};
  read(obj, "range_m", r.range_m);
  read(obj, "processing_delay_s", r.processing_delay_s);
  if (!(r.range_m > 0.0)) throw InvalidConfig("router range_m must be positive");
  if (!(r.processing_delay_s >= 0.0)) throw InvalidConfig("router processing_delay_s must be >= 0");
  return r;
}

}  // namespace

std::vector<double> PopulationConfig::tier_shares() const {
  double mid_share = activity.mid.value_or(0.0);
  double heavy_share = activity.heavy.value_or(0.0);
  if (!activity.mid || !activity.heavy) {
    const double rest = 1.0 - activity.zero - activity.low - activity.top -
                        activity.mid.value_or(0.0) - activity.heavy.value_or(0.0);
    const double m = integral_power(tiers.mid_min, tiers.mid_max + 1.0, power_law_alpha);
    const double h = integral_power(tiers.heavy_min, tiers.heavy_max + 1.0, power_law_alpha);
    if (!activity.mid && !activity.heavy) {
      mid_share = rest * m / (m + h);
      heavy_share = rest * h / (m + h);
    } else if (!activity.mid) {
      mid_share = rest;
    } else {
      heavy_share = rest;
    }
  }
  return {activity.zero, activity.low, mid_share, heavy_share, activity.top};
}

void PopulationConfig::validate() const {
  const auto shares = tier_shares();
  double sum = 0.0;
  for (double s : shares) {
    if (!(s >= 0.0)) throw InvalidConfig("activity fractions must be non-negative");
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidConfig("activity fractions must sum to 1");
  const bool ordered = tiers.low_min >= 1 && tiers.low_min <= tiers.low_max &&
                       tiers.low_max < tiers.mid_min && tiers.mid_min <= tiers.mid_max &&
                       tiers.mid_max < tiers.heavy_min && tiers.heavy_min <= tiers.heavy_max &&
                       tiers.heavy_max < tiers.top_min && tiers.top_min <= tiers.top_max;
  if (!ordered) throw InvalidConfig("activity tier bounds must be increasing and disjoint");
  if (!(cheater_fraction >= 0.0 && cheater_fraction <= 1.0)) {
    throw InvalidConfig("cheater_fraction must be in [0, 1]");
  }
  if (!(special_fraction >= 0.0 && special_fraction <= 1.0) ||
      !(mayor_only_share >= 0.0 && mayor_only_share <= 1.0)) {
    throw InvalidConfig("special_fraction and mayor_only_share must be in [0, 1]");
  }
  if (n_users > 0 && n_venues == 0) throw InvalidConfig("a population needs venues");
  if (n_cities == 0) throw InvalidConfig("n_cities must be positive");
  if (!(power_law_alpha > 0.0)) throw InvalidConfig("power_law_alpha must be positive");
  if (!(city_sigma_m >= 0.0 && home_sigma_m >= 0.0 && neighborhood_radius_m > 0.0 &&
        gps_noise_m >= 0.0 && registration_rate_per_day >= 0.0)) {
    throw InvalidConfig("population distances and rates must be non-negative");
  }
  if (favorite_venues == 0) throw InvalidConfig("favorite_venues must be positive");
}

void ScenarioConfig::validate() const {
  world.validate();
  population.validate();
  if (duration_days == 0) throw InvalidConfig("duration_days must be positive");
  const auto explicit_venues = static_cast<std::uint32_t>(venues.size());
  const std::uint32_t total_venues = explicit_venues + population.n_venues;
  for (const auto& r : routers) {
    if (raw(r.venue_id) < 1 || raw(r.venue_id) > total_venues) {
      throw InvalidConfig("router references unknown venue " + std::to_string(raw(r.venue_id)));
    }
  }
  for (const auto& u : users) {
    for (const auto& c : u.checkins) {
      if (raw(c.venue_id) < 1 || raw(c.venue_id) > total_venues) {
        throw InvalidConfig("scripted check-in references unknown venue " +
                            std::to_string(raw(c.venue_id)));
      }
      if (c.t < start_time) throw InvalidConfig("scripted check-in before start_time");
    }
  }
  for (const auto& a : attacks) {
    if (a.start_venue && (raw(*a.start_venue) < 1 || raw(*a.start_venue) > total_venues)) {
      throw InvalidConfig("attack " + a.name + " starts at unknown venue");
    }
    for (const auto& e : a.schedule.entries) {
      if (raw(e.venue_id) < 1 || raw(e.venue_id) > total_venues) {
        throw InvalidConfig("attack " + a.name + " schedules unknown venue");
      }
      if (e.fire_time < std::max(start_time, a.start_time)) {
        throw InvalidConfig("attack " + a.name + " schedules a check-in before it starts");
      }
    }
  }
}

anticheat::RuleConfig parse_rules(const json& obj) {
  check_keys(obj,
             {"frequent_window_s", "max_speed_m_per_s", "rapidfire_side_m", "rapidfire_window_s",
              "rapidfire_count", "gps_radius_m"},
             "rules");
  anticheat::RuleConfig r;
  read(obj, "frequent_window_s", r.frequent_window_s);
  read(obj, "max_speed_m_per_s", r.max_speed_m_per_s);
  read(obj, "rapidfire_side_m", r.rapidfire_side_m);
  read(obj, "rapidfire_window_s", r.rapidfire_window_s);
  read(obj, "rapidfire_count", r.rapidfire_count);
  read(obj, "gps_radius_m", r.gps_radius_m);
  r.validate();
  return r;
}

std::vector<rewards::BadgeSpec> parse_badges(const json& arr) {
  if (!arr.is_array()) throw InvalidConfig("badges must be an array");
  std::vector<rewards::BadgeSpec> out;
  for (const json& b : arr) {
    check_keys(b, {"badge_id", "kind", "threshold", "window_days"}, "badges[]");
    rewards::BadgeSpec spec;
    spec.badge_id = b.at("badge_id").get<std::string>();
    const auto kind = b.at("kind").get<std::string>();
    if (kind == "DistinctVenues") spec.kind = rewards::BadgeKind::DistinctVenues;
    else if (kind == "CheckinsInWindow") spec.kind = rewards::BadgeKind::CheckinsInWindow;
    else throw InvalidConfig("unknown badge kind '" + kind + "'");
    spec.threshold = b.at("threshold").get<std::uint32_t>();
    read(b, "window_days", spec.window_days);
    spec.validate();
    out.push_back(std::move(spec));
  }
  return out;
}

ScenarioConfig parse_scenario(const json& doc) {
  try {
    check_keys(doc,
               {"seed", "start_time", "duration_days", "rules", "badges", "base_points",
                "recent_list_length", "venue_verification", "routers", "router_all_venues",
                "venues", "users", "population", "attacks", "snapshot_every_days", "save_state",
                "analytics", "output_dir"},
               "scenario");
    ScenarioConfig c;
    read(doc, "seed", c.seed);
    read(doc, "start_time", c.start_time);
    read(doc, "duration_days", c.duration_days);
    if (doc.contains("rules")) c.world.rules = parse_rules(doc.at("rules"));
    if (doc.contains("badges")) c.world.rewards.badges = parse_badges(doc.at("badges"));
    read(doc, "base_points", c.world.rewards.base_points);
    read(doc, "recent_list_length", c.world.recent_list_length);
    if (doc.contains("venue_verification")) {
      const auto mode = doc.at("venue_verification").get<std::string>();
      if (mode == "off") c.world.verification = verify::Mode::Off;
      else if (mode == "mark") c.world.verification = verify::Mode::Mark;
      else if (mode == "strict") c.world.verification = verify::Mode::Strict;
      else throw InvalidConfig("venue_verification must be off, mark or strict");
    }
    if (doc.contains("routers")) {
      for (const json& r : doc.at("routers")) c.routers.push_back(parse_router(r, true));
    }
    if (doc.contains("router_all_venues")) {
      c.router_all_venues = parse_router(doc.at("router_all_venues"), false);
    }
    if (doc.contains("venues")) {
      for (const json& v : doc.at("venues")) {
        check_keys(v, {"name", "lat", "lon", "has_mayor_special"}, "venues[]");
        ExplicitVenue ev;
        ev.name = v.at("name").get<std::string>();
        ev.location = geo::GeoPoint::checked(v.at("lat").get<double>(), v.at("lon").get<double>());
        read(v, "has_mayor_special", ev.has_mayor_special);
        c.venues.push_back(std::move(ev));
      }
    }
    if (doc.contains("users")) {
      for (const json& u : doc.at("users")) {
        check_keys(u, {"home", "checkins"}, "users[]");
        ExplicitUser eu;
        eu.home = parse_point(u.at("home"), "home");
        if (u.contains("checkins")) {
          for (const json& ci : u.at("checkins")) {
            check_keys(ci, {"venue_id", "t"}, "checkins[]");
            eu.checkins.push_back(
                {VenueId{ci.at("venue_id").get<std::uint32_t>()}, ci.at("t").get<Seconds>()});
          }
        }
        c.users.push_back(std::move(eu));
      }
    }
    if (doc.contains("population")) c.population = parse_population(doc.at("population"));
    if (doc.contains("attacks")) {
      std::size_t i = 0;
      for (const json& a : doc.at("attacks")) c.attacks.push_back(parse_attack(a, i++));
    }
    read(doc, "snapshot_every_days", c.snapshot_every_days);
    read(doc, "save_state", c.save_state);
    if (doc.contains("analytics")) c.thresholds = parse_thresholds(doc.at("analytics"));
    const json* analytics = doc.contains("analytics") ? &doc.at("analytics") : nullptr;
    if (!analytics || !analytics->contains("launch_time")) c.thresholds.age.launch_time = c.start_time;
    if (!analytics || !analytics->contains("registration_rate_per_day")) {
      c.thresholds.age.registration_rate_per_day = c.population.registration_rate_per_day;
    }
    if (doc.contains("output_dir")) c.output_dir = doc.at("output_dir").get<std::string>();
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("malformed scenario: ") + e.what());
  } catch (const InvalidCoordinate& e) {
    throw InvalidConfig(e.what());
  }
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidConfig(path.string() + ": " + e.what());
  }
  return parse_scenario(doc);
}

}  // namespace checkin::harness
