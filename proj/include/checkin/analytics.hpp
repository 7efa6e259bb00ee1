#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "checkin/geo.hpp"
#include "checkin/tables.hpp"
#include "checkin/types.hpp"

namespace checkin::analytics {

// Infers registration time from the sequential user id, the way an outside
// observer would: ids are handed out at a steady rate from launch.
struct AccountAgeModel {
  // Users per day; 0 means everybody registered at launch.
  double registration_rate_per_day = 0.0;
  Seconds launch_time = 0;

  [[nodiscard]] Seconds registered_at(UserId user) const;
  // Whole account age in days at `observed_at`, at least 1.
  [[nodiscard]] double age_days(UserId user, Seconds observed_at) const;
};

struct Thresholds {
  std::uint64_t badge_min_checkins = 1000;  // strictly more than this
  std::uint64_t badge_max_badges = 10;      // strictly fewer than this
  double max_daily_rate = 16.0;             // strictly more flags
  double travel_speed_m_per_s = 250.0;
  double cluster_radius_m = 50'000.0;
  std::size_t min_clusters = 10;
  std::uint64_t curve_max_total = 2000;
  AccountAgeModel age;
  // Observation time for account ages; the latest event when unset.
  std::optional<Seconds> observed_at;
};

struct TracePoint {
  Seconds t = 0;
  geo::GeoPoint location;
};

struct CurvePoint {
  std::uint64_t total_checkins = 0;
  double mean = 0.0;
  std::uint64_t users = 0;
};

inline constexpr std::string_view kBadgeAnomaly = "badge_anomaly";
inline constexpr std::string_view kDailyRate = "daily_rate";
inline constexpr std::string_view kDispersion = "dispersion";
inline constexpr std::string_view kInfeasibleSpeed = "infeasible_speed";

struct SuspicionReport {
  UserId user_id{};
  double recent_ratio = 0.0;
  bool badge_rate_flag = false;
  double daily_rate = 0.0;
  std::size_t speed_infeasible_pairs = 0;
  std::size_t dispersion_clusters = 0;
  std::vector<std::string> reasons;

  [[nodiscard]] bool suspicious() const { return !reasons.empty(); }

  bool operator==(const SuspicionReport&) const = default;
};

// Mean number of recent-list appearances per total check-in count, for
// totals up to curve_max_total.
std::vector<CurvePoint> compute_recent_ratio_curve(const PublicTables& tables,
                                                   const Thresholds& thresholds = {});

// Mean badge count per total check-in count.
std::vector<CurvePoint> compute_badge_curve(const PublicTables& tables);

bool flag_badge_anomaly(std::uint64_t total_checkins, std::uint64_t badges,
                        const Thresholds& thresholds = {});

bool flag_daily_rate(std::uint64_t total_checkins, double account_age_days,
                     const Thresholds& thresholds = {});

// Consecutive pairs whose implied speed exceeds the bound. Zero elapsed time
// between distinct places counts as infeasible.
std::size_t speed_feasibility(std::span<const TracePoint> trace, double max_speed_m_per_s);

// Greedy leader clustering over the distinct locations in canonical order, so
// the count ignores ordering and duplicates.
std::size_t dispersion(std::span<const TracePoint> trace, double radius_m);

// Per-user traces from the event log, located at each venue's public position.
std::vector<std::vector<TracePoint>> traces_by_user(const PublicTables& tables,
                                                    std::span<const EventRow> events);

// Runs every detector over every user in UserInfo. Sorted by reason count
// (most first) then user id.
std::vector<SuspicionReport> build_report(const PublicTables& tables,
                                          std::span<const EventRow> events,
                                          const Thresholds& thresholds = {});

void write_report_csv(std::span<const SuspicionReport> reports,
                      const std::filesystem::path& path);
std::vector<SuspicionReport> load_report_csv(const std::filesystem::path& path);
void write_curve_csv(std::span<const CurvePoint> curve, const std::string& value_column,
                     const std::filesystem::path& path);

}  // namespace checkin::analytics
