#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "checkin/analytics.hpp"
#include "checkin/config.hpp"
#include "checkin/population.hpp"
#include "checkin/world.hpp"

namespace checkin::harness {

struct AttackerMetrics {
  std::string name;
  UserId user_id{};
  std::uint64_t submitted = 0;
  std::uint64_t valid = 0;
  std::uint64_t points = 0;
  std::vector<std::string> badges;
  std::uint64_t mayorships = 0;
};

struct DetectionMetrics {
  std::uint64_t true_positives = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t false_negatives = 0;
  std::uint64_t true_negatives = 0;

  // Conventions for empty denominators: nothing flagged is perfectly
  // precise, no cheaters is perfect recall, no honest users has no false
  // positives.
  [[nodiscard]] double precision() const;
  [[nodiscard]] double recall() const;
  [[nodiscard]] double false_positive_rate() const;
};

struct RunMetrics {
  std::uint64_t users = 0;
  std::uint64_t venues = 0;
  std::uint64_t cheaters = 0;
  std::uint64_t total_checkins = 0;
  std::uint64_t valid_checkins = 0;
  std::uint64_t invalid_checkins = 0;
  std::map<std::string, std::uint64_t> invalid_by_flag;
  std::uint64_t mayors_count = 0;
  std::array<double, kTierCount> tier_shares{};  // observed, by UserInfo totals
  std::vector<AttackerMetrics> attackers;
  DetectionMetrics detection;
};

nlohmann::ordered_json to_json(const RunMetrics& metrics);

struct RunOptions {
  bool attacks = true;
  bool analytics = true;
};

struct ScenarioResult {
  World world;
  GeneratedPopulation population;
  std::vector<analytics::SuspicionReport> report;
  RunMetrics metrics;
};

// Output layout under config.output_dir:
//   exports/{UserInfo,VenueInfo,RecentCheckin}.csv, exports/events.jsonl
//   exports/day_NNNN/  periodic public CSV snapshots when snapshot_every_days > 0
//   attacks/<name>.jsonl  schedules the attackers executed
//   report.csv, curve_recent_ratio.csv, curve_badges.csv, metrics.json
//   state.bin when save_state is set
// Analytics reads the exports back from disk. Throws InvalidConfig and
// IoFailure.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

// Metrics from a finished world and its report; the report may be empty when
// analytics was skipped.
RunMetrics compute_metrics(const World& world, std::span<const analytics::SuspicionReport> report,
                           const TierBounds& tiers);

}  // namespace checkin::harness
