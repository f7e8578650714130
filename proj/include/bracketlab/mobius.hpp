// Moebius table by segmented sieve, correlation averages and short-interval
// suprema over arithmetic progressions.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bracketlab::mobius {

inline constexpr std::int64_t kSieveLimit = 100'000'000;

class MobiusTable {
 public:
  MobiusTable() = default;
  MobiusTable(std::int64_t limit, std::vector<std::int8_t> values);

  std::int64_t limit() const noexcept { return limit_; }
  /// mu(n) for 1 <= n <= limit.
  int operator()(std::int64_t n) const;

  /// "MU01", u64 limit (little endian), then mu(1..limit) as signed bytes.
  void save(const std::string& path) const;
  static MobiusTable load(const std::string& path);

 private:
  std::int64_t limit_ = 0;
  std::vector<std::int8_t> mu_;  // mu_[n], mu_[0] unused
};

MobiusTable mobius_sieve(std::int64_t N_max);

struct CorrelationReport {
  std::string origin;
  std::vector<std::pair<std::int64_t, double>> checkpoints;  // (N, (1/N) sum_{n<=N} mu(n) s(n))
  std::vector<std::int64_t> sums;                            // exact partial sums
};

/// s[n-1] holds s(n). Checkpoints must not exceed the table or s.
CorrelationReport correlation(const MobiusTable& mu, const std::vector<std::int64_t>& s,
                              const std::vector<std::int64_t>& checkpoints, std::string origin = {});

/// Averages over [M, 2M) for M = 1, 2, 4, ... with 2M - 1 <= N.
std::vector<std::pair<std::int64_t, double>> dyadic_blocks(const MobiusTable& mu, const std::vector<std::int64_t>& s,
                                                           std::int64_t N);

struct ShortIntervalRecord {
  std::int64_t N = 0;
  std::int64_t H = 0;
  int q_max = 0;
  double sup = 0;
  bool in_regime = true;  // N^0.626 <= H <= N
};

/// max over q <= q_max, r < q and sub-progressions P of {h < H : h = r mod q}
/// of |sum_{h in P} mu(N+h) s(h)| / H. s[h] holds s(h).
ShortIntervalRecord short_interval_sup(const MobiusTable& mu, const std::vector<std::int64_t>& s, std::int64_t N,
                                       std::int64_t H, int q_max = 50);

/// Least-squares slope of log|avg| against log N, skipping zero averages.
double decay_slope(const std::vector<std::pair<std::int64_t, double>>& checkpoints);

}  // namespace bracketlab::mobius
