#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "checkin/analytics.hpp"
#include "checkin/errors.hpp"
#include "checkin/population.hpp"

using namespace checkin;
using namespace checkin::harness;

namespace {

constexpr Seconds kYear = 365 * kSecondsPerDay;

PopulationConfig small(std::uint32_t users, std::uint32_t venues) {
  PopulationConfig p;
  p.n_users = users;
  p.n_venues = venues;
  return p;
}

// Probability mass of k under the floored continuous power law on [lo, hi+1).
double power_mass(double k, double lo, double hi, double alpha) {
  auto F = [alpha](double x) { return std::pow(x, 1.0 - alpha); };
  return (F(k) - F(k + 1)) / (F(lo) - F(hi + 1));
}

std::map<UserId, std::vector<PlannedCheckin>> by_user(const GeneratedPopulation& pop) {
  std::map<UserId, std::vector<PlannedCheckin>> out;
  for (const PlannedCheckin& c : pop.checkins) out[c.user].push_back(c);
  return out;
}

}  // namespace

TEST_CASE("power law draws stay in range and follow the mass function") {
  Rng rng(1);
  std::map<std::uint32_t, int> counts;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const auto k = sample_power_law(6, 15, 2.0, rng);
    REQUIRE(k >= 6);
    REQUIRE(k <= 15);
    ++counts[k];
  }
  double chi2 = 0.0;
  for (std::uint32_t k = 6; k <= 15; ++k) {
    const double expected = n * power_mass(k, 6, 15, 2.0);
    chi2 += std::pow(counts[k] - expected, 2) / expected;
  }
  CHECK(chi2 < 27.88);  // 9 degrees of freedom, p = 0.001
  for (int i = 0; i < 1000; ++i) CHECK(sample_power_law(3, 3, 1.0, rng) == 3);
}

TEST_CASE("tier sampling and classification") {
  Rng rng(2);
  const std::vector<double> shares{0.5, 0.0, 0.25, 0.25, 0.0};
  std::array<int, kTierCount> seen{};
  for (int i = 0; i < 40'000; ++i) ++seen[static_cast<std::size_t>(sample_tier(shares, rng))];
  CHECK(seen[1] == 0);
  CHECK(seen[4] == 0);
  CHECK(seen[0] / 40'000.0 == doctest::Approx(0.5).epsilon(0.03));
  CHECK(seen[2] / 40'000.0 == doctest::Approx(0.25).epsilon(0.05));

  const TierBounds b;
  CHECK(tier_of(0, b) == Tier::Zero);
  CHECK(tier_of(1, b) == Tier::Low);
  CHECK(tier_of(5, b) == Tier::Low);
  CHECK(tier_of(6, b) == Tier::Mid);
  CHECK(tier_of(99, b) == Tier::Mid);
  CHECK(tier_of(100, b) == Tier::Heavy);
  CHECK(tier_of(999, b) == Tier::Heavy);
  CHECK(tier_of(1000, b) == Tier::Top);
  CHECK(tier_of(50'000, b) == Tier::Top);
}

TEST_CASE("sampled counts land in their tier") {
  Rng rng(3);
  const PopulationConfig p;
  for (int i = 0; i < 5000; ++i) {
    const auto tier = static_cast<Tier>(i % kTierCount);
    CHECK(tier_of(sample_count(tier, p, rng), p.tiers) == tier);
  }
}

TEST_CASE("tier shares converge to the configured mix") {
  World w;
  const auto pop = generate_population(small(30'000, 3000), w, 0, kYear, 7);
  REQUIRE(pop.users.size() == 30'000);
  std::vector<std::uint64_t> planned(pop.users.size() + 1, 0);
  for (const PlannedCheckin& c : pop.checkins) ++planned[raw(c.user)];
  std::array<double, kTierCount> observed{};
  for (UserId u : pop.users) {
    observed[static_cast<std::size_t>(tier_of(planned[raw(u)], TierBounds{}))] += 1.0 / 30'000;
  }
  CHECK(std::abs(observed[0] - 0.363) <= 0.01);
  CHECK(std::abs(observed[1] - 0.204) <= 0.01);
  CHECK(std::abs(observed[4] - 0.002) <= 0.0015);
  const auto shares = PopulationConfig{}.tier_shares();
  CHECK(std::abs(observed[2] - shares[2]) <= 0.015);
  CHECK(std::abs(observed[3] - shares[3]) <= 0.015);
  for (std::size_t i = 0; i < pop.users.size(); ++i) {
    CHECK(pop.targets[i] == planned[raw(pop.users[i])]);
  }
}

TEST_CASE("same seed, same population") {
  PopulationConfig p = small(2000, 400);
  p.cheater_fraction = 0.1;
  World a;
  World b;
  const auto pa = generate_population(p, a, 0, 30 * kSecondsPerDay, 5);
  const auto pb = generate_population(p, b, 0, 30 * kSecondsPerDay, 5);
  CHECK(a == b);
  REQUIRE(pa.checkins.size() == pb.checkins.size());
  for (std::size_t i = 0; i < pa.checkins.size(); ++i) {
    CHECK(pa.checkins[i].t == pb.checkins[i].t);
    CHECK(pa.checkins[i].venue == pb.checkins[i].venue);
  }
  World c;
  const auto pc = generate_population(p, c, 0, 30 * kSecondsPerDay, 6);
  CHECK_FALSE(a == c);
}

TEST_CASE("venues sit in the region with the configured special share") {
  PopulationConfig p = small(0, 20'000);
  p.special_fraction = 0.5;
  p.mayor_only_share = 0.5;
  p.city_sigma_m = 0.0;
  World w;
  (void)generate_population(p, w, 0, kSecondsPerDay, 1);
  REQUIRE(w.venues().size() == 20'000);
  std::size_t special = 0;
  for (const Venue& v : w.venues()) {
    CHECK(p.region.contains(v.location));
    special += v.has_mayor_special;
  }
  CHECK(special / 20'000.0 == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("honest traces are physically feasible and pass every rule") {
  PopulationConfig p = small(3000, 1500);
  World w;
  const auto pop = generate_population(p, w, 0, 60 * kSecondsPerDay, 9);
  CHECK(pop.cheaters.empty());
  for (const auto& [user, trace] : by_user(pop)) {
    std::vector<analytics::TracePoint> points;
    for (const PlannedCheckin& c : trace) points.push_back({c.t, c.true_gps});
    CHECK(analytics::speed_feasibility(points, 40.0) == 0);
    for (const PlannedCheckin& c : trace) {
      CHECK(c.reported == c.true_gps);
      CHECK(geo::haversine_m(c.reported, w.venue(c.venue).location) < 200.0);
    }
  }
  std::size_t invalid = 0;
  for (const PlannedCheckin& c : pop.checkins) {
    invalid += !w.submit_checkin(c.user, c.venue, c.reported, c.true_gps, c.t).valid();
  }
  CHECK(invalid == 0);
}

TEST_CASE("naive teleporters always leave an infeasible pair") {
  PopulationConfig p = small(4000, 2000);
  p.cheater_fraction = 0.2;
  World w;
  const auto pop = generate_population(p, w, 0, 30 * kSecondsPerDay, 10);
  REQUIRE(pop.cheaters.size() > 400);
  CHECK(pop.cheaters.size() / 4000.0 == doctest::Approx(0.2).epsilon(0.15));
  const auto traces = by_user(pop);
  for (UserId u : pop.cheaters) {
    CHECK(w.user(u).is_cheater_ground_truth);
    const auto it = traces.find(u);
    REQUIRE(it != traces.end());
    std::vector<analytics::TracePoint> points;
    for (const PlannedCheckin& c : it->second) {
      points.push_back({c.t, w.venue(c.venue).location});
      CHECK(c.reported == w.venue(c.venue).location);
      CHECK(c.true_gps == w.user(u).home);
    }
    CHECK(analytics::speed_feasibility(points, 250.0) >= 1);
  }
  for (std::size_t i = 0; i < pop.users.size(); ++i) {
    if (w.user(pop.users[i]).is_cheater_ground_truth) CHECK(pop.tiers[i] >= Tier::Mid);
  }
}

TEST_CASE("scheduled evaders pass every rule") {
  PopulationConfig p = small(1500, 3000);
  p.cheater_fraction = 0.3;
  p.cheater_strategy = CheaterStrategy::ScheduledEvader;
  World w;
  const auto pop = generate_population(p, w, 0, 20 * kSecondsPerDay, 11);
  REQUIRE_FALSE(pop.cheaters.empty());
  std::size_t invalid = 0;
  for (const PlannedCheckin& c : pop.checkins) {
    invalid += !w.submit_checkin(c.user, c.venue, c.reported, c.true_gps, c.t).valid();
  }
  CHECK(invalid == 0);
}

TEST_CASE("late registrations shorten the active span") {
  PopulationConfig p = small(1000, 200);
  p.registration_rate_per_day = 100.0;
  World w;
  const auto pop = generate_population(p, w, 0, 10 * kSecondsPerDay, 12);
  const analytics::AccountAgeModel age{100.0, 0};
  for (const PlannedCheckin& c : pop.checkins) CHECK(c.t >= age.registered_at(c.user));
  CHECK(std::is_sorted(pop.checkins.begin(), pop.checkins.end(),
                       [](const PlannedCheckin& a, const PlannedCheckin& b) { return a.t < b.t; }));
}

TEST_CASE("invalid population configs are rejected") {
  World w;
  CHECK_THROWS_AS((void)generate_population(small(10, 0), w, 0, 100, 1), InvalidConfig);
  PopulationConfig p = small(10, 10);
  p.activity.zero = 0.9;
  p.activity.mid = 0.5;
  CHECK_THROWS_AS((void)generate_population(p, w, 0, 100, 1), InvalidConfig);
}
