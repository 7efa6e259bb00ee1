#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "checkin/geo.hpp"
#include "checkin/types.hpp"

namespace checkin {

class World;

// Crawlable projection of the service: what anybody can read from public
// user and venue pages. Recent visitors carry no timestamps.
struct UserRow {
  UserId user_id{};
  std::uint64_t total_checkins = 0;
  std::uint64_t total_badges = 0;
  std::uint64_t total_mayorships = 0;
  std::uint64_t recent_checkins = 0;

  bool operator==(const UserRow&) const = default;
};

struct VenueRow {
  VenueId venue_id{};
  std::string name;
  geo::GeoPoint location;
  std::uint64_t total_checkins = 0;
  std::uint64_t unique_visitors = 0;
  std::optional<UserId> mayor_id;
  bool has_mayor_special = false;

  bool operator==(const VenueRow&) const = default;
};

struct RecentRow {
  VenueId venue_id{};
  UserId user_id{};

  bool operator==(const RecentRow&) const = default;
};

struct PublicTables {
  std::vector<UserRow> users;
  std::vector<VenueRow> venues;
  std::vector<RecentRow> recent;  // per venue, most recent first

  bool operator==(const PublicTables&) const = default;
};

// One line of events.jsonl.
struct EventRow {
  Seconds t = 0;
  UserId user_id{};
  VenueId venue_id{};
  geo::GeoPoint reported;
  bool valid = true;
  std::vector<std::string> flags;

  bool operator==(const EventRow&) const = default;
};

inline const char* const kUserInfoFile = "UserInfo.csv";
inline const char* const kVenueInfoFile = "VenueInfo.csv";
inline const char* const kRecentCheckinFile = "RecentCheckin.csv";
inline const char* const kEventsFile = "events.jsonl";

// Mayors are read as of the world clock.
PublicTables public_tables(const World& world);

void write_public_tables(const PublicTables& tables, const std::filesystem::path& dir);

// Writes UserInfo.csv, VenueInfo.csv and RecentCheckin.csv into `dir`,
// creating it if needed. Throws IoFailure.
void export_public_profiles(const World& world, const std::filesystem::path& dir);

// Throws MissingTables when any of the three files is absent, IoFailure when
// one is malformed.
PublicTables load_public_tables(const std::filesystem::path& dir);

std::vector<EventRow> event_rows(const World& world);
std::string event_line(const EventRow& row);
void write_event_log(const std::vector<EventRow>& rows, const std::filesystem::path& path);
std::vector<EventRow> load_event_log(const std::filesystem::path& path);

}  // namespace checkin
