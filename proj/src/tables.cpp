#include "checkin/tables.hpp"

#include <fstream>
#include <string_view>

#include <json.hpp>

#include "checkin/csv.hpp"
#include "checkin/errors.hpp"
#include "checkin/world.hpp"

namespace checkin {
namespace {

const csv::Row kUserHeader = {"user_id", "total_checkins", "total_badges", "total_mayorships",
                              "recent_checkins"};
const csv::Row kVenueHeader = {"venue_id",       "name",          "lat",
                               "lon",            "total_checkins", "unique_visitors",
                               "mayor_id",       "has_mayor_special"};
const csv::Row kRecentHeader = {"venue_id", "user_id"};

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoFailure("cannot open " + path.string() + " for writing");
  }
  void line(std::string_view text) {
    out_ << text << '\n';
  }
  void close() {
    out_.close();
    if (!out_) throw IoFailure("write failed for " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string u64(std::uint64_t v) { return std::to_string(v); }

}  // namespace

PublicTables public_tables(const World& world) {
  PublicTables t;
  std::vector<std::uint64_t> mayorships(world.users().size(), 0);
  t.venues.reserve(world.venues().size());
  for (const Venue& v : world.venues()) {
    VenueRow row;
    row.venue_id = v.id;
    row.name = v.name;
    row.location = v.location;
    row.total_checkins = v.total_checkins;
    row.unique_visitors = v.unique_visitors;
    row.mayor_id = world.mayor_on_read(v.id);
    row.has_mayor_special = v.has_mayor_special;
    if (row.mayor_id) ++mayorships[raw(*row.mayor_id) - 1];
    t.venues.push_back(std::move(row));
    for (UserId u : v.recent_visitors) t.recent.push_back({v.id, u});
  }
  t.users.reserve(world.users().size());
  for (const UserProfile& u : world.users()) {
    t.users.push_back(UserRow{u.id, u.total_checkins, u.badges().size(),
                              mayorships[raw(u.id) - 1], u.recent_checkins});
  }
  return t;
}

void write_public_tables(const PublicTables& tables, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());

  Writer users(dir / kUserInfoFile);
  users.line(csv::join(kUserHeader));
  for (const UserRow& r : tables.users) {
    users.line(csv::join({u64(raw(r.user_id)), u64(r.total_checkins), u64(r.total_badges),
                          u64(r.total_mayorships), u64(r.recent_checkins)}));
  }
  users.close();

  Writer venues(dir / kVenueInfoFile);
  venues.line(csv::join(kVenueHeader));
  for (const VenueRow& r : tables.venues) {
    venues.line(csv::join({u64(raw(r.venue_id)), r.name, csv::format_double(r.location.lat),
                           csv::format_double(r.location.lon), u64(r.total_checkins),
                           u64(r.unique_visitors), r.mayor_id ? u64(raw(*r.mayor_id)) : "",
                           r.has_mayor_special ? "1" : "0"}));
  }
  venues.close();

  Writer recent(dir / kRecentCheckinFile);
  recent.line(csv::join(kRecentHeader));
  for (const RecentRow& r : tables.recent) {
    recent.line(u64(raw(r.venue_id)) + "," + u64(raw(r.user_id)));
  }
  recent.close();
}

void export_public_profiles(const World& world, const std::filesystem::path& dir) {
  write_public_tables(public_tables(world), dir);
}

PublicTables load_public_tables(const std::filesystem::path& dir) {
  for (const char* name : {kUserInfoFile, kVenueInfoFile, kRecentCheckinFile}) {
    if (!std::filesystem::exists(dir / name)) {
      throw MissingTables("missing " + (dir / name).string());
    }
  }
  PublicTables t;
  for (const csv::Row& r : csv::read_table(dir / kUserInfoFile, kUserHeader)) {
    t.users.push_back(UserRow{UserId{static_cast<std::uint32_t>(csv::parse_uint(r[0]))},
                              csv::parse_uint(r[1]), csv::parse_uint(r[2]),
                              csv::parse_uint(r[3]), csv::parse_uint(r[4])});
  }
  for (const csv::Row& r : csv::read_table(dir / kVenueInfoFile, kVenueHeader)) {
    VenueRow row;
    row.venue_id = VenueId{static_cast<std::uint32_t>(csv::parse_uint(r[0]))};
    row.name = r[1];
    row.location = geo::GeoPoint{csv::parse_double(r[2]), csv::parse_double(r[3])};
    if (!row.location.is_valid()) throw IoFailure("venue " + r[0] + " has invalid coordinates");
    row.total_checkins = csv::parse_uint(r[4]);
    row.unique_visitors = csv::parse_uint(r[5]);
    if (!r[6].empty()) row.mayor_id = UserId{static_cast<std::uint32_t>(csv::parse_uint(r[6]))};
    row.has_mayor_special = csv::parse_uint(r[7]) != 0;
    t.venues.push_back(std::move(row));
  }
  for (const csv::Row& r : csv::read_table(dir / kRecentCheckinFile, kRecentHeader)) {
    t.recent.push_back(RecentRow{VenueId{static_cast<std::uint32_t>(csv::parse_uint(r[0]))},
                                 UserId{static_cast<std::uint32_t>(csv::parse_uint(r[1]))}});
  }
  return t;
}

std::vector<EventRow> event_rows(const World& world) {
  std::vector<EventRow> rows;
  rows.reserve(world.events().size());
  for (const CheckInRecord& r : world.events()) {
    EventRow row;
    row.t = r.t;
    row.user_id = r.user_id;
    row.venue_id = r.venue_id;
    row.reported = r.reported_gps;
    row.valid = r.valid();
    for (anticheat::Flag f : r.verdict.flags()) row.flags.emplace_back(anticheat::flag_name(f));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string event_line(const EventRow& row) {
  std::string line = "{\"t\":" + std::to_string(row.t) +
                     ",\"user_id\":" + std::to_string(raw(row.user_id)) +
                     ",\"venue_id\":" + std::to_string(raw(row.venue_id)) +
                     ",\"reported_lat\":" + csv::format_double(row.reported.lat) +
                     ",\"reported_lon\":" + csv::format_double(row.reported.lon) +
                     ",\"valid\":" + (row.valid ? "true" : "false") + ",\"flags\":[";
  for (std::size_t i = 0; i < row.flags.size(); ++i) {
    if (i > 0) line += ',';
    line += nlohmann::json(row.flags[i]).dump();
  }
  line += "]}";
  return line;
}

void write_event_log(const std::vector<EventRow>& rows, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  Writer out(path);
  for (const EventRow& r : rows) out.line(event_line(r));
  out.close();
}

std::vector<EventRow> load_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingTables("cannot open event log " + path.string());
  std::vector<EventRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      EventRow row;
      row.t = j.at("t").get<Seconds>();
      row.user_id = UserId{j.at("user_id").get<std::uint32_t>()};
      row.venue_id = VenueId{j.at("venue_id").get<std::uint32_t>()};
      row.reported = geo::GeoPoint{j.at("reported_lat").get<double>(),
                                   j.at("reported_lon").get<double>()};
      row.valid = j.at("valid").get<bool>();
      row.flags = j.at("flags").get<std::vector<std::string>>();
      rows.push_back(std::move(row));
    } catch (const nlohmann::json::exception& e) {
      throw IoFailure(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace checkin
