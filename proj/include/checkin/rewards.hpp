#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "checkin/types.hpp"

namespace checkin::rewards {

inline constexpr std::int64_t kMayorWindowDays = 60;

enum class BadgeKind : std::uint8_t { DistinctVenues, CheckinsInWindow };

struct BadgeSpec {
  std::string badge_id;
  BadgeKind kind = BadgeKind::DistinctVenues;
  std::uint32_t threshold = 1;
  std::optional<std::uint32_t> window_days;

  // Throws InvalidConfig on threshold 0 or a window that does not match kind.
  void validate() const;

  bool operator==(const BadgeSpec&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(badge_id, kind, threshold, window_days);
  }
};

// Adventurer (10 distinct venues) and 30 check-ins in a month.
std::vector<BadgeSpec> default_badge_catalog();

struct RewardConfig {
  std::uint32_t base_points = 1;
  std::vector<BadgeSpec> badges = default_badge_catalog();

  void validate() const;

  bool operator==(const RewardConfig&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(base_points, badges);
  }
};

// Per-user progress toward badges, fed only by valid check-ins.
class BadgeProgress {
 public:
  void record(VenueId venue, Seconds t, Seconds max_window_s);

  [[nodiscard]] std::size_t distinct_venues() const { return venues_.size(); }
  // Valid check-ins with timestamp in (t - window_s, t].
  [[nodiscard]] std::size_t checkins_since(Seconds t, Seconds window_s) const;

  bool operator==(const BadgeProgress&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(venues_, times_);
  }

 private:
  std::vector<VenueId> venues_;  // sorted, unique
  std::deque<Seconds> times_;    // trimmed to the catalog's longest window
};

struct UserRewards {
  std::uint64_t points = 0;
  std::vector<std::string> badges;  // sorted, permanent
  BadgeProgress progress;

  [[nodiscard]] bool holds(const std::string& badge_id) const;

  bool operator==(const UserRewards&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(points, badges, progress);
  }
};

// Points credited for one valid check-in.
std::uint32_t award_points(const RewardConfig& config);

Seconds longest_badge_window(const std::vector<BadgeSpec>& catalog);

// Records a valid check-in and grants every newly satisfied badge. Returns the
// ids granted by this call.
std::vector<std::string> update_badges(UserRewards& user, VenueId venue, Seconds t,
                                       const std::vector<BadgeSpec>& catalog);

// Day on which a check-in still counts toward the mayorship of `today`.
constexpr bool in_mayor_window(std::int64_t day, std::int64_t today) {
  return day > today - kMayorWindowDays && day <= today;
}

// Mayorship competition at one venue: distinct check-in days per user over the
// trailing 60 days, and the current title holder, rolled forward through every
// expiry.
class MayorState {
 public:
  // Re-elects at every day on which some recorded day leaves the window, up to
  // and including `today`. Earlier days are a no-op.
  void advance_to(std::int64_t today);

  // Records a valid check-in by `user` on `day` and re-elects.
  void record_checkin(UserId user, std::int64_t day);

  [[nodiscard]] std::optional<UserId> mayor() const { return mayor_; }

  // The title as it would read on `today`, without touching this state.
  [[nodiscard]] std::optional<UserId> mayor_on(std::int64_t today) const;

  // Users whose days all left the window keep an empty entry, so this is the
  // venue's distinct valid visitor count.
  [[nodiscard]] std::size_t visitor_count() const { return days_.size(); }

  [[nodiscard]] std::uint32_t day_count(UserId user, std::int64_t today) const;

  // Election rule on `today`: most distinct days wins; a tied incumbent keeps
  // the title, otherwise the lowest user id; nobody with a day in the window
  // means no mayor.
  [[nodiscard]] std::optional<UserId> leader(std::int64_t today,
                                             std::optional<UserId> incumbent) const;

  bool operator==(const MayorState&) const = default;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(days_, mayor_, as_of_);
  }

 private:
  void prune(std::int64_t today);

  std::map<UserId, std::deque<std::int64_t>> days_;  // ascending distinct days
  std::optional<UserId> mayor_;
  std::optional<std::int64_t> as_of_;
};

// Brings the title up to time t and returns it.
std::optional<UserId> recompute_mayor(MayorState& state, Seconds t);

}  // namespace checkin::rewards
