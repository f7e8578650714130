#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "bracketlab/errors.hpp"
#include "bracketlab/mobius.hpp"

using namespace bracketlab;
using namespace bracketlab::mobius;

namespace {

int trial_mu(std::int64_t n) {
  int sign = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    sign = -sign;
  }
  return n > 1 ? -sign : sign;
}

double brute_sup(const MobiusTable& mu, const std::vector<std::int64_t>& s, std::int64_t N, std::int64_t H) {
  std::int64_t best = 0;
  for (std::int64_t a = 0; a < H; ++a) {
    std::int64_t sum = 0;
    for (std::int64_t b = a; b < H; ++b) {
      sum += mu(N + b) * s[b];
      best = std::max(best, std::abs(sum));
    }
  }
  return static_cast<double>(best) / static_cast<double>(H);
}

}  // namespace

TEST_CASE("sieve examples") {
  const auto mu = mobius_sieve(1000);
  CHECK(mu(1) == 1);
  CHECK(mu(12) == 0);
  CHECK(mu(30) == -1);
  CHECK(mu(997) == -1);
  long sum = 0;
  for (int n = 1; n <= 100; ++n) sum += mu(n);
  CHECK(sum == 1);
  CHECK_THROWS_AS(mu(0), Error);
  CHECK_THROWS_AS(mu(1001), Error);
  CHECK_THROWS_AS(mobius_sieve(kSieveLimit + 1), Error);
}

TEST_CASE("sieve matches trial division") {
  const auto mu = mobius_sieve(1000000);
  for (std::int64_t n = 1; n <= 100000; ++n) REQUIRE(mu(n) == trial_mu(n));
  for (std::int64_t n = 100001; n <= 1000000; n += 7) REQUIRE(mu(n) == trial_mu(n));
}

TEST_CASE("random values up to the sieve limit") {
  std::mt19937_64 rng(31);
  const auto mu = mobius_sieve(kSieveLimit);
  CHECK(mu.limit() == kSieveLimit);
  for (int i = 0; i < 10000; ++i) {
    const std::int64_t n = std::uniform_int_distribution<std::int64_t>(1, kSieveLimit)(rng);
    REQUIRE(mu(n) == trial_mu(n));
  }
  CHECK(mu(kSieveLimit) == 0);
}

TEST_CASE("correlation examples") {
  const auto mu = mobius_sieve(1000000);
  const auto one = correlation(mu, std::vector<std::int64_t>(1000, 1), {100, 1000}, "const1");
  CHECK(one.checkpoints[0].second == doctest::Approx(0.01));
  CHECK(one.sums[0] == 1);
  CHECK(one.sums[1] == 2);  // M(1000)
  const auto zero = correlation(mu, std::vector<std::int64_t>(500, 0), {10, 500});
  for (const auto& [N, avg] : zero.checkpoints) CHECK(avg == 0.0);
  std::vector<std::int64_t> self(1000000);
  for (std::int64_t n = 1; n <= 1000000; ++n) self[n - 1] = mu(n);
  const auto sq = correlation(mu, self, {1000000});
  CHECK(std::abs(sq.checkpoints[0].second - 6 / (M_PI * M_PI)) < 0.001);
  CHECK_THROWS_AS(correlation(mu, self, {1000001}), Error);
}

TEST_CASE("dyadic blocks") {
  const auto mu = mobius_sieve(1000);
  const std::vector<std::int64_t> s(1000, 1);
  const auto blocks = dyadic_blocks(mu, s, 1000);
  REQUIRE(blocks.size() == 9);  // M = 1..256
  CHECK(blocks[0].first == 1);
  CHECK(blocks[0].second == 1.0);
  CHECK(blocks[1].second == doctest::Approx(-1.0));  // mu(2) + mu(3) over 2
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::int64_t M = blocks[i].first;
    long sum = 0;
    for (std::int64_t n = M; n < 2 * M; ++n) sum += mu(n);
    CHECK(blocks[i].second == doctest::Approx(static_cast<double>(sum) / static_cast<double>(M)));
  }
}

TEST_CASE("short interval examples") {
  const auto mu = mobius_sieve(1020000);
  CHECK(short_interval_sup(mu, std::vector<std::int64_t>(100, 0), 1000, 100).sup == 0.0);
  for (std::int64_t N : {30L, 31L, 36L}) {
    const auto r = short_interval_sup(mu, {5}, N, 1);
    CHECK(r.sup == std::abs(mu(N) * 5));
  }
  const std::vector<std::int64_t> ones(10000, 1);
  const auto big = short_interval_sup(mu, ones, 1000000, 10000, 1);
  CHECK(big.in_regime);
  CHECK(big.sup == doctest::Approx(brute_sup(mu, ones, 1000000, 10000)));
  const auto small = short_interval_sup(mu, ones, 1000000, 1000, 1);
  CHECK(small.sup == brute_sup(mu, ones, 1000000, 1000));
  CHECK_FALSE(small.in_regime);
  CHECK_THROWS_AS(short_interval_sup(mu, ones, 10, 20), Error);
}

TEST_CASE("prefix-sum sup equals quadratic brute force") {
  const auto mu = mobius_sieve(200000);
  std::mt19937_64 rng(37);
  for (int t = 0; t < 50; ++t) {
    const std::int64_t H = std::uniform_int_distribution<std::int64_t>(1, 1000)(rng);
    const std::int64_t N = std::uniform_int_distribution<std::int64_t>(H, 199000)(rng);
    std::vector<std::int64_t> s(static_cast<std::size_t>(H));
    for (auto& x : s) x = std::uniform_int_distribution<int>(-2, 2)(rng);
    CHECK(short_interval_sup(mu, s, N, H, 1).sup == brute_sup(mu, s, N, H));
  }
}

TEST_CASE("residue classes are searched") {
  const auto mu = mobius_sieve(2000);
  std::vector<std::int64_t> s(200);
  // s picks out mu on even offsets with the sign that makes every term +1
  for (std::int64_t h = 0; h < 200; h += 2) s[h] = mu(1000 + h);
  std::int64_t count = 0;
  for (std::int64_t h = 0; h < 200; h += 2) count += mu(1000 + h) != 0;
  CHECK(short_interval_sup(mu, s, 1000, 200, 2).sup == doctest::Approx(static_cast<double>(count) / 200));
}

TEST_CASE("save and load round trip") {
  const auto mu = mobius_sieve(12345);
  const auto path = (std::filesystem::temp_directory_path() / "bracketlab_mu_test.bin").string();
  mu.save(path);
  CHECK(std::filesystem::file_size(path) == 4 + 8 + 12345);
  const auto back = MobiusTable::load(path);
  CHECK(back.limit() == 12345);
  for (std::int64_t n = 1; n <= 12345; ++n) REQUIRE(back(n) == mu(n));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(MobiusTable::load(path), Error);
}

TEST_CASE("decay slope") {
  std::vector<std::pair<std::int64_t, double>> pts;
  for (int j = 10; j <= 20; ++j) pts.emplace_back(1L << j, std::pow(2.0, -0.5 * j) * (j % 2 ? -1 : 1));
  CHECK(decay_slope(pts) == doctest::Approx(-0.5));
  pts.emplace_back(1L << 21, 0.0);
  CHECK(decay_slope(pts) == doctest::Approx(-0.5));
}
