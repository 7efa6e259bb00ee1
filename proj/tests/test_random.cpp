#include <doctest.h>

#include <cmath>
#include <vector>

#include "checkin/random.hpp"

using checkin::Rng;

TEST_CASE("same seed, same stream") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs = differs || x != c.next();
  }
  CHECK(differs);
}

TEST_CASE("mt19937_64 reference value") {
  // The 10000th output of a default-seeded mt19937_64 is fixed by the standard.
  Rng rng(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next();
  CHECK(x == 9981545732273789042ULL);
}

TEST_CASE("uniform stays in range") {
  Rng rng(1);
  double sum = 0.0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    const double v = rng.uniform(-3.0, 5.0);
    REQUIRE(v >= -3.0);
    REQUIRE(v < 5.0);
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("below is unbiased and bounded") {
  Rng rng(2);
  std::vector<int> counts(7, 0);
  const int n = 140'000;
  for (int i = 0; i < n; ++i) {
    const auto k = rng.below(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  // Chi-square with 6 degrees of freedom; 22.46 is the 0.999 quantile.
  double chi = 0.0;
  const double expected = n / 7.0;
  for (int c : counts) chi += (c - expected) * (c - expected) / expected;
  CHECK(chi < 22.46);
  CHECK(rng.below(1) == 0);
}

TEST_CASE("normal and exponential moments") {
  Rng rng(3);
  const int n = 200'000;
  double s = 0, s2 = 0, e = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
    const double x = rng.exponential(4.0);
    REQUIRE(x >= 0.0);
    e += x;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(e / n == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("state round trip resumes the stream") {
  Rng rng(9);
  for (int i = 0; i < 17; ++i) (void)rng.next();
  (void)rng.normal();
  const auto saved = rng.state();
  std::vector<std::uint64_t> expected;
  for (int i = 0; i < 50; ++i) expected.push_back(rng.next());
  Rng other(0);
  other.restore(saved);
  for (auto x : expected) CHECK(other.next() == x);
}
