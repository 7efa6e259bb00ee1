#include <doctest.h>

#include <filesystem>
#include <limits>

#include "checkin/errors.hpp"
#include "checkin/world.hpp"
#include "support.hpp"

using namespace checkin;
using anticheat::Flag;
using geo::GeoPoint;

namespace {

const GeoPoint kA{40.7128, -74.0060};

// A small world with venues on a 0.01 degree grid.
World grid_world(WorldConfig config = {}, std::uint64_t seed = 1) {
  World w(config, seed);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      w.register_venue("v" + std::to_string(i * 8 + j), {kA.lat + 0.01 * i, kA.lon + 0.01 * j},
                       (i + j) % 3 == 0);
    }
  }
  for (int u = 0; u < 6; ++u) w.register_user(kA, u == 5);
  return w;
}

// Random mixed workload: honest moves, teleports, GPS offsets, repeats.
void random_workload(World& w, Rng& rng, int n, Seconds t0 = 0) {
  Seconds t = std::max(t0, w.now());
  for (int i = 0; i < n; ++i) {
    t += static_cast<Seconds>(rng.below(rng.uniform() < 0.1 ? 20 * 86'400 : 2000));
    const UserId u{1 + static_cast<std::uint32_t>(rng.below(w.users().size()))};
    const VenueId v{1 + static_cast<std::uint32_t>(rng.below(w.venues().size()))};
    GeoPoint reported = w.venue(v).location;
    if (rng.uniform() < 0.1) reported = geo::offset_point(reported, rng.uniform(0, 360), 2000);
    const GeoPoint truth = rng.uniform() < 0.5 ? reported : geo::offset_point(reported, 90, 1e6);
    w.submit_checkin(u, v, reported, truth, t);
  }
}

}  // namespace

TEST_CASE("ids are sequential from one") {
  World w;
  CHECK(w.register_venue("a", kA, false) == VenueId{1});
  CHECK(w.register_venue("b", kA, true) == VenueId{2});
  CHECK(w.register_user(kA) == UserId{1});
  CHECK(w.register_user(kA) == UserId{2});
  CHECK(w.venue(VenueId{2}).has_mayor_special);
  CHECK_FALSE(w.venue(VenueId{1}).mayor_id);
  CHECK_THROWS_AS((void)w.register_venue("bad", {95, 0}, false), InvalidCoordinate);
}

TEST_CASE("valid and invalid submissions") {
  World w;
  const VenueId v = w.register_venue("a", kA, false);
  const UserId u = w.register_user(kA);
  const auto& first = w.submit_checkin(u, v, kA, 100);
  CHECK(first.valid());
  CHECK(first.points_awarded == 1);
  CHECK(w.user(u).points() == 1);
  CHECK(w.user(u).total_checkins == 1);
  CHECK(w.venue(v).recent_visitors.size() == 1);

  const auto& again = w.submit_checkin(u, v, kA, 100 + 1800);
  CHECK(again.verdict.has(Flag::FrequentCheckin));
  CHECK(again.points_awarded == 0);
  CHECK(w.user(u).total_checkins == 2);
  CHECK(w.user(u).valid_checkins == 1);
  CHECK(w.user(u).points() == 1);
  CHECK(w.venue(v).total_checkins == 1);

  const UserId other = w.register_user(kA);
  const auto& off = w.submit_checkin(other, v, geo::offset_point(kA, 0, 10'000), 2000);
  CHECK(off.verdict.flags() == std::vector<Flag>{Flag::GpsMismatch});
  CHECK(w.venue(v).recent_visitors.size() == 1);
  CHECK(w.user(other).recent_checkins == 0);
  CHECK(w.check_invariants().empty());
}

TEST_CASE("submission errors") {
  World w;
  const VenueId v = w.register_venue("a", kA, false);
  const UserId u = w.register_user(kA);
  CHECK_THROWS_AS(w.submit_checkin(UserId{9}, v, kA, 0), UnknownUser);
  CHECK_THROWS_AS(w.submit_checkin(u, VenueId{9}, kA, 0), UnknownVenue);
  CHECK_THROWS_AS(w.submit_checkin(u, VenueId{0}, kA, 0), UnknownVenue);
  w.submit_checkin(u, v, kA, 500);
  CHECK_THROWS_AS(w.submit_checkin(u, v, kA, 499), ClockRegression);
  CHECK_THROWS_AS(w.submit_checkin(u, v, {0, 200}, 600), InvalidCoordinate);
  CHECK(w.events().size() == 1);
}

TEST_CASE("recent visitor list is front-inserted, distinct and bounded") {
  WorldConfig c;
  c.recent_list_length = 3;
  World w(c);
  const VenueId v = w.register_venue("a", kA, false);
  for (int i = 0; i < 5; ++i) w.register_user(kA);
  Seconds t = 0;
  for (std::uint32_t u : {1, 2, 3, 4}) w.submit_checkin(UserId{u}, v, kA, t += 10);
  CHECK(w.venue(v).recent_visitors == std::deque<UserId>{UserId{4}, UserId{3}, UserId{2}});
  CHECK(w.user(UserId{1}).recent_checkins == 0);
  w.submit_checkin(UserId{2}, v, kA, t += 4000);
  CHECK(w.venue(v).recent_visitors == std::deque<UserId>{UserId{2}, UserId{4}, UserId{3}});
  CHECK(w.venue(v).unique_visitors == 4);
  CHECK(w.check_invariants().empty());
}

TEST_CASE("mayorship through the pipeline") {
  World w;
  const VenueId v = w.register_venue("a", kA, true);
  const UserId u = w.register_user(kA);
  for (int d = 0; d < 4; ++d) w.submit_checkin(u, v, kA, d * 86'400 + 1000);
  CHECK(w.venue(v).mayor_id == u);
  CHECK(w.user(u).total_mayorships == 1);
  w.advance_clock(3 * 86'400 + 60 * 86'400);
  CHECK(w.mayor_on_read(v) == std::nullopt);
  CHECK(w.venue(v).mayor_id == u);
  w.settle_mayors(w.now());
  CHECK(w.venue(v).mayor_id == std::nullopt);
  CHECK(w.user(u).total_mayorships == 0);
  CHECK(w.check_invariants().empty());
}

TEST_CASE("lazy and eager mayors agree on random workloads") {
  World w = grid_world();
  Rng rng(5);
  for (int round = 0; round < 20; ++round) {
    random_workload(w, rng, 100);
    std::vector<std::optional<UserId>> lazy;
    for (const Venue& v : w.venues()) lazy.push_back(w.mayor_on_read(v.id));
    w.settle_mayors(w.now());
    for (const Venue& v : w.venues()) CHECK(v.mayor_id == lazy[raw(v.id) - 1]);
    REQUIRE(w.check_invariants().empty());
  }
}

TEST_CASE("counters stay consistent") {
  World w = grid_world();
  Rng rng(6);
  random_workload(w, rng, 3000);
  CHECK(w.check_invariants().empty());
  std::uint64_t invalid = 0;
  for (const auto& r : w.events()) invalid += r.valid() ? 0 : 1;
  std::uint64_t total = 0, valid = 0;
  for (const auto& u : w.users()) {
    total += u.total_checkins;
    valid += u.valid_checkins;
    CHECK(u.points() == u.valid_checkins);
    CHECK(u.badges().size() <= 2);
  }
  CHECK(total == w.events().size());
  CHECK(total == valid + invalid);
  CHECK(invalid > 0);
  CHECK(valid > 0);
}

TEST_CASE("verdicts never depend on true_gps") {
  World a = grid_world(), b = grid_world();
  Rng ra(7), rb(7), noise(8);
  Seconds t = 0;
  for (int i = 0; i < 2000; ++i) {
    t += static_cast<Seconds>(ra.below(1500));
    (void)rb.below(1500);
    const UserId u{1 + static_cast<std::uint32_t>(ra.below(6))};
    const VenueId v{1 + static_cast<std::uint32_t>(ra.below(64))};
    (void)rb.below(6);
    (void)rb.below(64);
    const GeoPoint reported = a.venue(v).location;
    const GeoPoint wild{noise.uniform(-90, 90), noise.uniform(-180, 180)};
    const auto& x = a.submit_checkin(u, v, reported, reported, t);
    const auto& y = b.submit_checkin(u, v, reported, wild, t);
    REQUIRE(x.verdict == y.verdict);
  }
}

TEST_CASE("venue verification modes") {
  WorldConfig mark;
  mark.verification = verify::Mode::Mark;
  World m(mark);
  const VenueId v = m.register_venue("a", kA, true);
  const UserId u = m.register_user(kA);
  verify::RouterRegistration r;
  r.venue_id = v;
  r.location = kA;
  m.register_router(r);
  const auto& remote = m.submit_checkin(u, v, kA, geo::offset_point(kA, 0, 1e6), 0);
  CHECK(remote.venue_attested == false);
  CHECK(remote.valid());

  WorldConfig strict;
  strict.verification = verify::Mode::Strict;
  World s(strict);
  const VenueId sv = s.register_venue("a", kA, true);
  const VenueId bare = s.register_venue("b", geo::offset_point(kA, 0, 50), false);
  const UserId su = s.register_user(kA);
  const UserId honest = s.register_user(kA);
  s.register_router(r);
  const auto& spoof = s.submit_checkin(su, sv, kA, geo::offset_point(kA, 0, 1e6), 0);
  CHECK(spoof.verdict.flags() == std::vector<Flag>{Flag::VenueUnverified});
  CHECK(*spoof.verdict.detail(Flag::VenueUnverified) == doctest::Approx(1e6).epsilon(1e-6));
  CHECK(s.user(su).points() == 0);
  CHECK_FALSE(s.venue(sv).mayor_id);
  const auto& ok = s.submit_checkin(honest, sv, kA, geo::offset_point(kA, 10, 30), 10);
  CHECK(ok.valid());
  CHECK(ok.venue_attested == true);
  const auto& no_router = s.submit_checkin(honest, bare, kA, kA, 5000);
  CHECK(no_router.verdict.has(Flag::VenueUnverified));
  CHECK(std::isinf(*no_router.verdict.detail(Flag::VenueUnverified)));

  World off;
  const VenueId ov = off.register_venue("a", kA, false);
  const UserId ou = off.register_user(kA);
  CHECK_FALSE(off.submit_checkin(ou, ov, kA, 0).venue_attested);
  r.venue_id = VenueId{99};
  CHECK_THROWS_AS(off.register_router(r), UnknownVenue);
}

TEST_CASE("snapshot round trip") {
  const auto dir = testing::scratch("world_snapshot");
  World empty;
  empty.save_state(dir / "empty.bin");
  CHECK(World::load_state(dir / "empty.bin") == empty);

  World w = grid_world({}, 99);
  Rng rng(10);
  random_workload(w, rng, 500);
  (void)w.rng().next();
  w.save_state(dir / "mid.bin");
  World loaded = World::load_state(dir / "mid.bin");
  CHECK(loaded == w);
  CHECK(loaded.rng().next() == w.rng().next());
  CHECK(loaded.serialize() == w.serialize());

  // Identical continuations after the reload.
  Rng r1(11), r2(11);
  random_workload(w, r1, 500);
  random_workload(loaded, r2, 500);
  CHECK(loaded == w);
  CHECK(loaded.serialize() == w.serialize());
}

TEST_CASE("damaged snapshots are rejected") {
  const auto dir = testing::scratch("world_corrupt");
  World w = grid_world();
  Rng rng(12);
  random_workload(w, rng, 200);
  w.save_state(dir / "ok.bin");
  const std::string bytes = testing::slurp(dir / "ok.bin");

  testing::spit(dir / "short.bin", bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS((void)World::load_state(dir / "short.bin"), CorruptSnapshot);

  std::string flipped = bytes;
  flipped[flipped.size() - 7] ^= 0x10;
  testing::spit(dir / "flip.bin", flipped);
  CHECK_THROWS_AS((void)World::load_state(dir / "flip.bin"), CorruptSnapshot);

  testing::spit(dir / "junk.bin", "not a snapshot");
  CHECK_THROWS_AS((void)World::load_state(dir / "junk.bin"), CorruptSnapshot);

  CHECK_THROWS_AS((void)World::load_state(dir / "missing.bin"), IoFailure);
  CHECK_THROWS_AS(w.save_state(dir / "no" / "such" / "dir" / "x.bin"), IoFailure);
}

TEST_CASE("replay reproduces every verdict and counter") {
  WorldConfig c;
  c.verification = verify::Mode::Strict;
  World w = grid_world(c);
  for (const Venue& v : w.venues()) {
    if (raw(v.id) % 2 == 0) continue;
    verify::RouterRegistration r;
    r.venue_id = v.id;
    r.location = v.location;
    w.register_router(r);
  }
  Rng rng(13);
  random_workload(w, rng, 2000);
  w.settle_mayors(w.now() + 86'400);
  const World replayed = World::replay(w);
  CHECK(replayed == w);
  REQUIRE(replayed.events().size() == w.events().size());
  for (std::size_t i = 0; i < w.events().size(); ++i) {
    REQUIRE(replayed.events()[i] == w.events()[i]);
  }
}
