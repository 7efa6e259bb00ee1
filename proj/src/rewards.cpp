#include "checkin/rewards.hpp"

#include <algorithm>

#include "checkin/errors.hpp"

namespace checkin::rewards {

void BadgeSpec::validate() const {
  if (badge_id.empty()) throw InvalidConfig("badge_id must not be empty");
  if (threshold < 1) throw InvalidConfig("badge " + badge_id + ": threshold must be >= 1");
  const bool windowed = kind == BadgeKind::CheckinsInWindow;
  if (windowed != window_days.has_value()) {
    throw InvalidConfig("badge " + badge_id +
                        ": window_days is required exactly for CheckinsInWindow");
  }
  if (window_days && *window_days < 1) {
    throw InvalidConfig("badge " + badge_id + ": window_days must be >= 1");
  }
}

std::vector<BadgeSpec> default_badge_catalog() {
  return {
      BadgeSpec{"adventurer", BadgeKind::DistinctVenues, 10, std::nullopt},
      BadgeSpec{"thirty_in_a_month", BadgeKind::CheckinsInWindow, 30, 30},
  };
}

void RewardConfig::validate() const {
  std::vector<std::string> ids;
  for (const BadgeSpec& b : badges) {
    b.validate();
    ids.push_back(b.badge_id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw InvalidConfig("duplicate badge_id in catalog");
  }
}

void BadgeProgress::record(VenueId venue, Seconds t, Seconds max_window_s) {
  auto pos = std::lower_bound(venues_.begin(), venues_.end(), venue);
  if (pos == venues_.end() || *pos != venue) venues_.insert(pos, venue);
  times_.push_back(t);
  while (!times_.empty() && times_.front() <= t - max_window_s) times_.pop_front();
}

std::size_t BadgeProgress::checkins_since(Seconds t, Seconds window_s) const {
  const Seconds cutoff = t - window_s;
  auto first = std::upper_bound(times_.begin(), times_.end(), cutoff);
  auto last = std::upper_bound(times_.begin(), times_.end(), t);
  return static_cast<std::size_t>(std::distance(first, last));
}

bool UserRewards::holds(const std::string& badge_id) const {
  return std::binary_search(badges.begin(), badges.end(), badge_id);
}

std::uint32_t award_points(const RewardConfig& config) { return config.base_points; }

Seconds longest_badge_window(const std::vector<BadgeSpec>& catalog) {
  Seconds longest = 0;
  for (const BadgeSpec& b : catalog) {
    if (b.window_days) longest = std::max<Seconds>(longest, *b.window_days * kSecondsPerDay);
  }
  return longest;
}

std::vector<std::string> update_badges(UserRewards& user, VenueId venue, Seconds t,
                                       const std::vector<BadgeSpec>& catalog) {
  user.progress.record(venue, t, longest_badge_window(catalog));
  std::vector<std::string> granted;
  for (const BadgeSpec& spec : catalog) {
    if (user.holds(spec.badge_id)) continue;
    bool earned = false;
    switch (spec.kind) {
      case BadgeKind::DistinctVenues:
        earned = user.progress.distinct_venues() >= spec.threshold;
        break;
      case BadgeKind::CheckinsInWindow:
        earned = user.progress.checkins_since(t, Seconds{*spec.window_days} * kSecondsPerDay) >=
                 spec.threshold;
        break;
    }
    if (earned) {
      user.badges.insert(std::upper_bound(user.badges.begin(), user.badges.end(), spec.badge_id),
                         spec.badge_id);
      granted.push_back(spec.badge_id);
    }
  }
  return granted;
}

void MayorState::prune(std::int64_t today) {
  for (auto& [user, days] : days_) {
    while (!days.empty() && !in_mayor_window(days.front(), today)) days.pop_front();
  }
}

void MayorState::advance_to(std::int64_t today) {
  if (as_of_ && today <= *as_of_) return;
  for (;;) {
    std::optional<std::int64_t> next_expiry;
    for (const auto& [user, days] : days_) {
      if (days.empty()) continue;
      const std::int64_t expiry = days.front() + kMayorWindowDays;
      if (!next_expiry || expiry < *next_expiry) next_expiry = expiry;
    }
    if (!next_expiry || *next_expiry > today) break;
    prune(*next_expiry);
    mayor_ = leader(*next_expiry, mayor_);
  }
  prune(today);
  mayor_ = leader(today, mayor_);
  as_of_ = today;
}

void MayorState::record_checkin(UserId user, std::int64_t day) {
  advance_to(day);
  auto& days = days_[user];
  if (days.empty() || days.back() < day) days.push_back(day);
  mayor_ = leader(as_of_.value_or(day), mayor_);
}

std::optional<UserId> MayorState::mayor_on(std::int64_t today) const {
  if (as_of_ && today <= *as_of_) return mayor_;
  MayorState copy = *this;
  copy.advance_to(today);
  return copy.mayor_;
}

std::uint32_t MayorState::day_count(UserId user, std::int64_t today) const {
  auto it = days_.find(user);
  if (it == days_.end()) return 0;
  return static_cast<std::uint32_t>(std::count_if(
      it->second.begin(), it->second.end(),
      [today](std::int64_t d) { return in_mayor_window(d, today); }));
}

std::optional<UserId> MayorState::leader(std::int64_t today,
                                         std::optional<UserId> incumbent) const {
  std::uint32_t best = 0;
  std::optional<UserId> winner;
  for (const auto& [user, days] : days_) {
    const auto n = static_cast<std::uint32_t>(std::count_if(
        days.begin(), days.end(), [today](std::int64_t d) { return in_mayor_window(d, today); }));
    // Ascending user id; strict > keeps the lowest id on ties.
    if (n > best) {
      best = n;
      winner = user;
    }
  }
  if (best == 0) return std::nullopt;
  if (incumbent && day_count(*incumbent, today) == best) return incumbent;
  return winner;
}

std::optional<UserId> recompute_mayor(MayorState& state, Seconds t) {
  state.advance_to(day_of(t));
  return state.mayor();
}

}  // namespace checkin::rewards
