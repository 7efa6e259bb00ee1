#include "checkin/world.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <sstream>

#include <cereal/archives/portable_binary.hpp>
#include <cereal/types/deque.hpp>
#include <cereal/types/map.hpp>
#include <cereal/types/optional.hpp>
#include <cereal/types/string.hpp>
#include <cereal/types/vector.hpp>

#include "checkin/errors.hpp"

namespace checkin {
namespace {

constexpr std::string_view kSnapshotMagic = "CHECKIN-SIM-SNAPSHOT\n";
constexpr std::uint32_t kSnapshotVersion = 1;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
  }
}

template <class T>
T get_le(std::string_view in, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace

void WorldConfig::validate() const {
  rules.validate();
  rewards.validate();
  if (recent_list_length == 0) throw InvalidConfig("recent_list_length must be positive");
}

World::World(WorldConfig config, std::uint64_t seed) : config_(std::move(config)), rng_(seed) {
  config_.validate();
}

VenueId World::register_venue(std::string name, geo::GeoPoint location, bool has_mayor_special) {
  location = geo::GeoPoint::checked(location.lat, location.lon);
  Venue v;
  v.id = VenueId{static_cast<std::uint32_t>(venues_.size() + 1)};
  v.name = std::move(name);
  v.location = location;
  v.has_mayor_special = has_mayor_special;
  venues_.push_back(std::move(v));
  mayors_.emplace_back();
  return venues_.back().id;
}

UserId World::register_user(geo::GeoPoint home, bool is_cheater) {
  home = geo::GeoPoint::checked(home.lat, home.lon);
  UserProfile u;
  u.id = UserId{static_cast<std::uint32_t>(users_.size() + 1)};
  u.home = home;
  u.is_cheater_ground_truth = is_cheater;
  users_.push_back(std::move(u));
  user_states_.emplace_back();
  return users_.back().id;
}

void World::register_router(verify::RouterRegistration router) {
  if (!has_venue(router.venue_id)) {
    throw UnknownVenue("router references unknown venue " +
                       std::to_string(raw(router.venue_id)));
  }
  routers_.add(router);
}

bool World::has_user(UserId id) const { return raw(id) >= 1 && raw(id) <= users_.size(); }
bool World::has_venue(VenueId id) const { return raw(id) >= 1 && raw(id) <= venues_.size(); }

const Venue& World::venue(VenueId id) const {
  if (!has_venue(id)) throw UnknownVenue("unknown venue " + std::to_string(raw(id)));
  return venues_[raw(id) - 1];
}

const UserProfile& World::user(UserId id) const {
  if (!has_user(id)) throw UnknownUser("unknown user " + std::to_string(raw(id)));
  return users_[raw(id) - 1];
}

Venue& World::venue_mut(VenueId id) { return const_cast<Venue&>(venue(id)); }
UserProfile& World::user_mut(UserId id) { return const_cast<UserProfile&>(user(id)); }

void World::advance_clock(Seconds now) {
  if (now < clock_) {
    throw ClockRegression("time " + std::to_string(now) + " precedes clock " +
                          std::to_string(clock_));
  }
  clock_ = now;
}

const CheckInRecord& World::submit_checkin(UserId user, VenueId venue, geo::GeoPoint reported_gps,
                                           Seconds t) {
  return submit_checkin(user, venue, reported_gps, reported_gps, t);
}

const CheckInRecord& World::submit_checkin(UserId user_id, VenueId venue_id,
                                           geo::GeoPoint reported_gps, geo::GeoPoint true_gps,
                                           Seconds t) {
  UserProfile& user = user_mut(user_id);
  Venue& venue = venue_mut(venue_id);
  reported_gps = geo::GeoPoint::checked(reported_gps.lat, reported_gps.lon);
  true_gps = geo::GeoPoint::checked(true_gps.lat, true_gps.lon);
  advance_clock(t);

  UserState& state = user_states_[raw(user_id) - 1];
  CheckInRecord record;
  record.user_id = user_id;
  record.venue_id = venue_id;
  record.reported_gps = reported_gps;
  record.true_gps = true_gps;
  record.t = t;
  record.verdict = anticheat::evaluate(state.history, {venue.id, venue.location}, reported_gps,
                                       t, config_.rules);

  if (config_.verification != verify::Mode::Off) {
    const bool attested = verify::attest_checkin(venue_id, true_gps, routers_);
    record.venue_attested = attested;
    if (!attested && config_.verification == verify::Mode::Strict) {
      const auto* router = routers_.find(venue_id);
      const double distance = router != nullptr
                                  ? geo::haversine_m(router->location, true_gps)
                                  : std::numeric_limits<double>::infinity();
      record.verdict.raise(anticheat::Flag::VenueUnverified, distance);
    }
  }

  ++user.total_checkins;
  if (record.valid()) {
    ++user.valid_checkins;
    ++venue.total_checkins;

    state.history.push_back({venue_id, venue.location, t, true});
    const Seconds horizon = anticheat::history_horizon(t, config_.rules);
    auto keep = std::find_if(state.history.begin(), state.history.end(),
                             [horizon](const auto& c) { return c.t > horizon; });
    if (keep == state.history.end()) keep = std::prev(state.history.end());
    state.history.erase(state.history.begin(), keep);

    enter_recent_list(venue, user_id);

    record.points_awarded = rewards::award_points(config_.rewards);
    user.rewards.points += record.points_awarded;
    record.badges_granted =
        rewards::update_badges(user.rewards, venue_id, t, config_.rewards.badges);

    rewards::MayorState& mayor = mayors_[raw(venue_id) - 1];
    mayor.record_checkin(user_id, day_of(t));
    venue.unique_visitors = mayor.visitor_count();
    apply_mayor(venue, mayor.mayor());
  }

  events_.push_back(std::move(record));
  return events_.back();
}

void World::enter_recent_list(Venue& venue, UserId user) {
  auto& list = venue.recent_visitors;
  auto it = std::find(list.begin(), list.end(), user);
  if (it != list.end()) {
    list.erase(it);
  } else {
    ++user_mut(user).recent_checkins;
  }
  list.push_front(user);
  while (list.size() > config_.recent_list_length) {
    --user_mut(list.back()).recent_checkins;
    list.pop_back();
  }
}

void World::apply_mayor(Venue& venue, std::optional<UserId> mayor) {
  if (venue.mayor_id == mayor) return;
  if (venue.mayor_id) --user_mut(*venue.mayor_id).total_mayorships;
  if (mayor) ++user_mut(*mayor).total_mayorships;
  venue.mayor_id = mayor;
}

void World::settle_mayors(Seconds now) {
  advance_clock(now);
  for (Venue& v : venues_) {
    apply_mayor(v, rewards::recompute_mayor(mayors_[raw(v.id) - 1], now));
  }
}

std::optional<UserId> World::mayor_on_read(VenueId id) const {
  (void)venue(id);
  return mayors_[raw(id) - 1].mayor_on(day_of(clock_));
}

std::vector<std::string> World::check_invariants() const {
  std::vector<std::string> problems;
  auto report = [&problems](std::string msg) { problems.push_back(std::move(msg)); };
  std::vector<std::uint64_t> mayorships(users_.size(), 0);
  std::vector<std::uint64_t> appearances(users_.size(), 0);

  for (std::size_t i = 0; i < venues_.size(); ++i) {
    const Venue& v = venues_[i];
    const std::string tag = "venue " + std::to_string(i + 1) + ": ";
    if (raw(v.id) != i + 1) report(tag + "id out of sequence");
    if (v.recent_visitors.size() > config_.recent_list_length) report(tag + "recent list too long");
    std::vector<UserId> distinct(v.recent_visitors.begin(), v.recent_visitors.end());
    std::sort(distinct.begin(), distinct.end());
    if (std::adjacent_find(distinct.begin(), distinct.end()) != distinct.end()) {
      report(tag + "duplicate recent visitor");
    }
    if (v.total_checkins < v.unique_visitors || v.unique_visitors < distinct.size()) {
      report(tag + "total >= unique >= recent ordering broken");
    }
    for (UserId u : distinct) {
      if (!has_user(u)) report(tag + "recent visitor not registered");
      else ++appearances[raw(u) - 1];
    }
    if (v.mayor_id) {
      if (!has_user(*v.mayor_id)) report(tag + "mayor not registered");
      else ++mayorships[raw(*v.mayor_id) - 1];
    }
  }
  std::uint64_t valid_events = 0;
  for (const CheckInRecord& r : events_) valid_events += r.valid() ? 1 : 0;
  std::uint64_t valid_sum = 0;
  for (std::size_t i = 0; i < users_.size(); ++i) {
    const UserProfile& u = users_[i];
    const std::string tag = "user " + std::to_string(i + 1) + ": ";
    if (raw(u.id) != i + 1) report(tag + "id out of sequence");
    if (u.total_mayorships != mayorships[i]) report(tag + "mayorship count mismatch");
    if (u.recent_checkins != appearances[i]) report(tag + "recent appearance count mismatch");
    if (u.valid_checkins > u.total_checkins) report(tag + "more valid than total check-ins");
    if (u.rewards.points != u.valid_checkins * config_.rewards.base_points) {
      report(tag + "points not derived from valid check-ins");
    }
    valid_sum += u.valid_checkins;
  }
  if (valid_sum != valid_events) report("valid check-in totals disagree with event log");
  for (std::size_t i = 1; i < events_.size(); ++i) {
    if (events_[i].t < events_[i - 1].t) {
      report("event log time regression at index " + std::to_string(i));
      break;
    }
  }
  return problems;
}

template <class Archive>
void World::serialize(Archive& ar) {
  std::string rng_state;
  if constexpr (Archive::is_saving::value) rng_state = rng_.state();
  ar(config_, clock_, rng_state, venues_, users_, user_states_, mayors_, routers_, events_);
  if constexpr (Archive::is_loading::value) rng_.restore(rng_state);
}

std::string World::serialize() const {
  std::ostringstream out(std::ios::binary);
  {
    cereal::PortableBinaryOutputArchive archive(out);
    archive(const_cast<World&>(*this));
  }
  return out.str();
}

World World::deserialize(const std::string& bytes) {
  World w;
  try {
    std::istringstream in(bytes, std::ios::binary);
    cereal::PortableBinaryInputArchive archive(in);
    archive(w);
  } catch (const cereal::Exception& e) {
    throw CorruptSnapshot(std::string("undecodable snapshot payload: ") + e.what());
  }
  return w;
}

void World::save_state(const std::filesystem::path& path) const {
  const std::string payload = serialize();
  std::string file(kSnapshotMagic);
  put_le<std::uint32_t>(file, kSnapshotVersion);
  put_le<std::uint64_t>(file, payload.size());
  put_le<std::uint64_t>(file, fnv1a64(payload));
  file += payload;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
  out.write(file.data(), static_cast<std::streamsize>(file.size()));
  if (!out) throw IoFailure("write failed for " + path.string());
}

World World::load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t header = kSnapshotMagic.size() + 4 + 8 + 8;
  if (file.size() < header || std::string_view(file).substr(0, kSnapshotMagic.size()) !=
                                  kSnapshotMagic) {
    throw CorruptSnapshot(path.string() + ": missing snapshot header");
  }
  std::string_view view(file);
  const auto version = get_le<std::uint32_t>(view, kSnapshotMagic.size());
  const auto size = get_le<std::uint64_t>(view, kSnapshotMagic.size() + 4);
  const auto checksum = get_le<std::uint64_t>(view, kSnapshotMagic.size() + 12);
  if (version != kSnapshotVersion) throw CorruptSnapshot(path.string() + ": unknown version");
  if (file.size() - header != size) throw CorruptSnapshot(path.string() + ": truncated payload");
  const std::string_view payload = view.substr(header);
  if (fnv1a64(payload) != checksum) throw CorruptSnapshot(path.string() + ": checksum mismatch");
  return deserialize(std::string(payload));
}

World World::replay(const World& source) {
  World w(source.config_);
  w.rng_ = source.rng_;
  for (const Venue& v : source.venues_) w.register_venue(v.name, v.location, v.has_mayor_special);
  for (const UserProfile& u : source.users_) w.register_user(u.home, u.is_cheater_ground_truth);
  w.routers_ = source.routers_;
  for (const CheckInRecord& r : source.events_) {
    w.submit_checkin(r.user_id, r.venue_id, r.reported_gps, r.true_gps, r.t);
  }
  if (source.clock_ > w.clock_) w.settle_mayors(source.clock_);
  return w;
}

bool World::operator==(const World& other) const {
  return config_ == other.config_ && clock_ == other.clock_ && rng_ == other.rng_ &&
         venues_ == other.venues_ && users_ == other.users_ &&
         user_states_ == other.user_states_ && mayors_ == other.mayors_ &&
         routers_ == other.routers_ && events_ == other.events_;
}

}  // namespace checkin
