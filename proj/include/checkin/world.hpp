#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "checkin/anticheat.hpp"
#include "checkin/geo.hpp"
#include "checkin/random.hpp"
#include "checkin/rewards.hpp"
#include "checkin/types.hpp"
#include "checkin/venue_verify.hpp"

namespace checkin {

struct Venue {
  VenueId id{};
  std::string name;
  geo::GeoPoint location;
  bool has_mayor_special = false;
  std::uint64_t total_checkins = 0;   // valid only
  std::uint64_t unique_visitors = 0;  // users with at least one valid check-in
  std::optional<UserId> mayor_id;
  std::deque<UserId> recent_visitors;  // most recent first, distinct

  bool operator==(const Venue&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(id, name, location, has_mayor_special, total_checkins, unique_visitors, mayor_id,
       recent_visitors);
  }
};

struct UserProfile {
  UserId id{};
  geo::GeoPoint home;
  std::uint64_t total_checkins = 0;  // every submission, valid or not
  std::uint64_t valid_checkins = 0;
  std::uint64_t total_mayorships = 0;
  std::uint64_t recent_checkins = 0;  // venues whose recent list holds this user
  rewards::UserRewards rewards;
  bool is_cheater_ground_truth = false;  // simulation only, never exported

  [[nodiscard]] std::uint64_t points() const { return rewards.points; }
  [[nodiscard]] const std::vector<std::string>& badges() const { return rewards.badges; }

  bool operator==(const UserProfile&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(id, home, total_checkins, valid_checkins, total_mayorships, recent_checkins, rewards,
       is_cheater_ground_truth);
  }
};

struct CheckInRecord {
  UserId user_id{};
  VenueId venue_id{};
  geo::GeoPoint reported_gps;
  geo::GeoPoint true_gps;  // ground truth; never handed to the rules
  Seconds t = 0;
  anticheat::RuleVerdict verdict;
  std::optional<bool> venue_attested;  // set when venue verification is on
  std::uint32_t points_awarded = 0;
  std::vector<std::string> badges_granted;

  [[nodiscard]] bool valid() const { return verdict.valid(); }

  bool operator==(const CheckInRecord&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(user_id, venue_id, reported_gps, true_gps, t, verdict, venue_attested, points_awarded,
       badges_granted);
  }
};

struct WorldConfig {
  anticheat::RuleConfig rules;
  rewards::RewardConfig rewards;
  std::size_t recent_list_length = 10;
  verify::Mode verification = verify::Mode::Off;

  void validate() const;

  bool operator==(const WorldConfig&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(rules, rewards, recent_list_length, verification);
  }
};

// Simulated service state. Every mutation goes through one submission
// sequence whose timestamps never decrease.
class World {
 public:
  explicit World(WorldConfig config = {}, std::uint64_t seed = 0);

  VenueId register_venue(std::string name, geo::GeoPoint location, bool has_mayor_special);
  UserId register_user(geo::GeoPoint home, bool is_cheater = false);
  void register_router(verify::RouterRegistration router);

  // Device at its reported position.
  const CheckInRecord& submit_checkin(UserId user, VenueId venue, geo::GeoPoint reported_gps,
                                      Seconds t);
  // Runs the rules on reported data, then venue verification on the device's
  // true location, then rewards for valid check-ins. Throws UnknownUser,
  // UnknownVenue or ClockRegression.
  const CheckInRecord& submit_checkin(UserId user, VenueId venue, geo::GeoPoint reported_gps,
                                      geo::GeoPoint true_gps, Seconds t);

  // Advances the clock to `now` and recomputes every venue's mayor.
  void settle_mayors(Seconds now);
  void advance_clock(Seconds now);

  // Mayor as it would read at the current clock, computed without mutation.
  [[nodiscard]] std::optional<UserId> mayor_on_read(VenueId venue) const;

  [[nodiscard]] const Venue& venue(VenueId id) const;
  [[nodiscard]] const UserProfile& user(UserId id) const;
  [[nodiscard]] const std::vector<Venue>& venues() const { return venues_; }
  [[nodiscard]] const std::vector<UserProfile>& users() const { return users_; }
  [[nodiscard]] const std::vector<CheckInRecord>& events() const { return events_; }
  [[nodiscard]] const WorldConfig& config() const { return config_; }
  [[nodiscard]] const verify::RouterRegistry& routers() const { return routers_; }
  [[nodiscard]] Seconds now() const { return clock_; }
  [[nodiscard]] bool has_user(UserId id) const;
  [[nodiscard]] bool has_venue(VenueId id) const;

  Rng& rng() { return rng_; }

  // Empty when every structural invariant holds; otherwise one line per
  // violation.
  [[nodiscard]] std::vector<std::string> check_invariants() const;

  // Binary image of the complete state, including clock and generator.
  [[nodiscard]] std::string serialize() const;
  static World deserialize(const std::string& bytes);

  // Single-file snapshot with a checksummed header. Throws IoFailure, and
  // CorruptSnapshot when loading a damaged file.
  void save_state(const std::filesystem::path& path) const;
  static World load_state(const std::filesystem::path& path);

  // A fresh world with the same configuration, generator, venues, users and
  // routers that re-submits every recorded check-in in order, then settles
  // mayors at the source clock if it is later.
  static World replay(const World& source);

  bool operator==(const World&) const;

  template <class Archive>
  void serialize(Archive& ar);

 private:
  struct UserState {
    std::vector<anticheat::PriorCheckin> history;  // valid only, trimmed

    bool operator==(const UserState&) const = default;

    template <class Archive>
    void serialize(Archive& ar) {
      ar(history);
    }
  };

  Venue& venue_mut(VenueId id);
  UserProfile& user_mut(UserId id);
  void enter_recent_list(Venue& venue, UserId user);
  void apply_mayor(Venue& venue, std::optional<UserId> mayor);

  WorldConfig config_;
  Seconds clock_ = 0;
  Rng rng_;
  std::vector<Venue> venues_;
  std::vector<UserProfile> users_;
  std::vector<UserState> user_states_;
  std::vector<rewards::MayorState> mayors_;
  verify::RouterRegistry routers_;
  std::vector<CheckInRecord> events_;
};

}  // namespace checkin
