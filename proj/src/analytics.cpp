#include "checkin/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

#include "checkin/csv.hpp"
#include "checkin/errors.hpp"

namespace checkin::analytics {
namespace {

const csv::Row kReportHeader = {"user_id",          "recent_ratio", "badge_flag", "daily_rate",
                                "infeasible_pairs", "clusters",     "suspicious", "reasons"};

std::vector<CurvePoint> mean_by_total(
    const std::map<std::uint64_t, std::pair<double, std::uint64_t>>& sums) {
  std::vector<CurvePoint> out;
  out.reserve(sums.size());
  for (const auto& [total, acc] : sums) {
    out.push_back({total, acc.first / static_cast<double>(acc.second), acc.second});
  }
  return out;
}

std::vector<std::uint64_t> recent_appearances(const PublicTables& tables, std::size_t n_users) {
  std::vector<std::uint64_t> counts(n_users + 1, 0);
  for (const RecentRow& r : tables.recent) {
    if (raw(r.user_id) <= n_users) ++counts[raw(r.user_id)];
  }
  return counts;
}

std::uint32_t max_user_id(const PublicTables& tables) {
  std::uint32_t m = 0;
  for (const UserRow& u : tables.users) m = std::max(m, raw(u.user_id));
  return m;
}

}  // namespace

Seconds AccountAgeModel::registered_at(UserId user) const {
  if (registration_rate_per_day <= 0.0) return launch_time;
  const double days = static_cast<double>(raw(user) - 1) / registration_rate_per_day;
  return launch_time + static_cast<Seconds>(std::floor(days * kSecondsPerDay));
}

double AccountAgeModel::age_days(UserId user, Seconds observed_at) const {
  const double age =
      static_cast<double>(observed_at - registered_at(user)) / static_cast<double>(kSecondsPerDay);
  return std::max(1.0, std::floor(age));
}

std::vector<CurvePoint> compute_recent_ratio_curve(const PublicTables& tables,
                                                   const Thresholds& thresholds) {
  if (tables.users.empty() && !tables.recent.empty()) {
    throw MissingTables("RecentCheckin rows without UserInfo");
  }
  const auto appearances = recent_appearances(tables, max_user_id(tables));
  std::map<std::uint64_t, std::pair<double, std::uint64_t>> sums;
  for (const UserRow& u : tables.users) {
    if (u.total_checkins > thresholds.curve_max_total) continue;
    auto& acc = sums[u.total_checkins];
    acc.first += static_cast<double>(appearances[raw(u.user_id)]);
    ++acc.second;
  }
  return mean_by_total(sums);
}

std::vector<CurvePoint> compute_badge_curve(const PublicTables& tables) {
  std::map<std::uint64_t, std::pair<double, std::uint64_t>> sums;
  for (const UserRow& u : tables.users) {
    auto& acc = sums[u.total_checkins];
    acc.first += static_cast<double>(u.total_badges);
    ++acc.second;
  }
  return mean_by_total(sums);
}

bool flag_badge_anomaly(std::uint64_t total_checkins, std::uint64_t badges,
                        const Thresholds& thresholds) {
  return total_checkins > thresholds.badge_min_checkins && badges < thresholds.badge_max_badges;
}

bool flag_daily_rate(std::uint64_t total_checkins, double account_age_days,
                     const Thresholds& thresholds) {
  const double age = std::max(1.0, account_age_days);
  return static_cast<double>(total_checkins) / age > thresholds.max_daily_rate;
}

std::size_t speed_feasibility(std::span<const TracePoint> trace, double max_speed_m_per_s) {
  std::size_t infeasible = 0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const double d = geo::haversine_m(trace[i - 1].location, trace[i].location);
    const Seconds dt = trace[i].t - trace[i - 1].t;
    if (dt <= 0) {
      if (d > 0.0) ++infeasible;
      continue;
    }
    if (d / static_cast<double>(dt) > max_speed_m_per_s) ++infeasible;
  }
  return infeasible;
}

std::size_t dispersion(std::span<const TracePoint> trace, double radius_m) {
  std::vector<geo::GeoPoint> points;
  points.reserve(trace.size());
  for (const TracePoint& p : trace) points.push_back(p.location);
  auto key = [](const geo::GeoPoint& a) { return std::pair{a.lat, a.lon}; };
  std::sort(points.begin(), points.end(),
            [&](const auto& a, const auto& b) { return key(a) < key(b); });
  points.erase(std::unique(points.begin(), points.end()), points.end());

  std::vector<geo::GeoPoint> leaders;
  for (const geo::GeoPoint& p : points) {
    const bool joined = std::any_of(leaders.begin(), leaders.end(), [&](const geo::GeoPoint& l) {
      return geo::haversine_m(l, p) <= radius_m;
    });
    if (!joined) leaders.push_back(p);
  }
  return leaders.size();
}

std::vector<std::vector<TracePoint>> traces_by_user(const PublicTables& tables,
                                                    std::span<const EventRow> events) {
  std::unordered_map<std::uint32_t, geo::GeoPoint> venue_location;
  venue_location.reserve(tables.venues.size());
  for (const VenueRow& v : tables.venues) venue_location.emplace(raw(v.venue_id), v.location);

  std::vector<std::vector<TracePoint>> traces(max_user_id(tables) + 1);
  for (const EventRow& e : events) {
    if (raw(e.user_id) >= traces.size()) continue;
    auto it = venue_location.find(raw(e.venue_id));
    const geo::GeoPoint where = it != venue_location.end() ? it->second : e.reported;
    traces[raw(e.user_id)].push_back({e.t, where});
  }
  for (auto& trace : traces) {
    std::stable_sort(trace.begin(), trace.end(),
                     [](const TracePoint& a, const TracePoint& b) { return a.t < b.t; });
  }
  return traces;
}

std::vector<SuspicionReport> build_report(const PublicTables& tables,
                                          std::span<const EventRow> events,
                                          const Thresholds& thresholds) {
  if (tables.users.empty()) {
    if (!tables.venues.empty() || !events.empty()) {
      throw MissingTables("UserInfo is empty but other inputs are not");
    }
    return {};
  }
  Seconds observed_at = thresholds.observed_at.value_or(0);
  if (!thresholds.observed_at) {
    for (const EventRow& e : events) observed_at = std::max(observed_at, e.t);
  }
  const auto appearances = recent_appearances(tables, max_user_id(tables));
  const auto traces = traces_by_user(tables, events);

  std::vector<SuspicionReport> reports;
  reports.reserve(tables.users.size());
  for (const UserRow& u : tables.users) {
    SuspicionReport r;
    r.user_id = u.user_id;
    const auto recent = appearances[raw(u.user_id)];
    r.recent_ratio = u.total_checkins == 0
                         ? 0.0
                         : static_cast<double>(recent) / static_cast<double>(u.total_checkins);
    r.badge_rate_flag = flag_badge_anomaly(u.total_checkins, u.total_badges, thresholds);
    const double age = thresholds.age.age_days(u.user_id, observed_at);
    r.daily_rate = static_cast<double>(u.total_checkins) / age;
    const auto& trace = traces[raw(u.user_id)];
    r.speed_infeasible_pairs = speed_feasibility(trace, thresholds.travel_speed_m_per_s);
    r.dispersion_clusters = trace.empty() ? 0 : dispersion(trace, thresholds.cluster_radius_m);

    if (r.badge_rate_flag) r.reasons.emplace_back(kBadgeAnomaly);
    if (flag_daily_rate(u.total_checkins, age, thresholds)) r.reasons.emplace_back(kDailyRate);
    if (r.dispersion_clusters >= thresholds.min_clusters) r.reasons.emplace_back(kDispersion);
    if (r.speed_infeasible_pairs > 0) r.reasons.emplace_back(kInfeasibleSpeed);
    reports.push_back(std::move(r));
  }
  std::stable_sort(reports.begin(), reports.end(),
                   [](const SuspicionReport& a, const SuspicionReport& b) {
                     if (a.reasons.size() != b.reasons.size()) {
                       return a.reasons.size() > b.reasons.size();
                     }
                     return a.user_id < b.user_id;
                   });
  return reports;
}

void write_report_csv(std::span<const SuspicionReport> reports,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out << csv::join(kReportHeader) << '\n';
  for (const SuspicionReport& r : reports) {
    std::string reasons;
    for (std::size_t i = 0; i < r.reasons.size(); ++i) {
      if (i > 0) reasons += ';';
      reasons += r.reasons[i];
    }
    out << csv::join({std::to_string(raw(r.user_id)), csv::format_fixed(r.recent_ratio, 6),
                      r.badge_rate_flag ? "1" : "0", csv::format_fixed(r.daily_rate, 6),
                      std::to_string(r.speed_infeasible_pairs),
                      std::to_string(r.dispersion_clusters), r.suspicious() ? "1" : "0",
                      reasons})
        << '\n';
  }
  if (!out) throw IoFailure("write failed for " + path.string());
}

std::vector<SuspicionReport> load_report_csv(const std::filesystem::path& path) {
  std::vector<SuspicionReport> out;
  for (const csv::Row& row : csv::read_table(path, kReportHeader)) {
    SuspicionReport r;
    r.user_id = UserId{static_cast<std::uint32_t>(csv::parse_uint(row[0]))};
    r.recent_ratio = csv::parse_double(row[1]);
    r.badge_rate_flag = row[2] == "1";
    r.daily_rate = csv::parse_double(row[3]);
    r.speed_infeasible_pairs = csv::parse_uint(row[4]);
    r.dispersion_clusters = csv::parse_uint(row[5]);
    std::string_view rest = row[7];
    while (!rest.empty()) {
      const auto cut = rest.find(';');
      r.reasons.emplace_back(rest.substr(0, cut));
      if (cut == std::string_view::npos) break;
      rest.remove_prefix(cut + 1);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_curve_csv(std::span<const CurvePoint> curve, const std::string& value_column,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out << "total_checkins," << value_column << ",users\n";
  for (const CurvePoint& p : curve) {
    out << p.total_checkins << ',' << csv::format_fixed(p.mean, 6) << ',' << p.users << '\n';
  }
  if (!out) throw IoFailure("write failed for " + path.string());
}

}  // namespace checkin::analytics
