#include "bracketlab/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "bracketlab/errors.hpp"

namespace bracketlab::mobius {

namespace {

[[noreturn]] void fail(ErrorKind kind, const char* op, const std::string& detail) {
  throw Error(kind, "mobius", op, detail);
}

std::vector<std::int64_t> small_primes(std::int64_t bound) {
  std::vector<bool> composite(static_cast<std::size_t>(bound) + 1, false);
  std::vector<std::int64_t> primes;
  for (std::int64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::int64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return primes;
}

}  // namespace

MobiusTable::MobiusTable(std::int64_t limit, std::vector<std::int8_t> values) : limit_(limit), mu_(std::move(values)) {
  if (static_cast<std::int64_t>(mu_.size()) != limit_ + 1) fail(ErrorKind::Config, "MobiusTable", "size mismatch");
}

int MobiusTable::operator()(std::int64_t n) const {
  if (n < 1 || n > limit_) {
    fail(ErrorKind::Domain, "mu", "n=" + std::to_string(n) + " outside [1, " + std::to_string(limit_) + "]");
  }
  return mu_[static_cast<std::size_t>(n)];
}

void MobiusTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "save", "cannot open " + path);
  out.write("MU01", 4);
  unsigned char header[8];
  for (int i = 0; i < 8; ++i) header[i] = static_cast<unsigned char>(static_cast<std::uint64_t>(limit_) >> (8 * i));
  out.write(reinterpret_cast<const char*>(header), 8);
  out.write(reinterpret_cast<const char*>(mu_.data() + 1), static_cast<std::streamsize>(limit_));
  if (!out) fail(ErrorKind::Io, "save", "write failed for " + path);
}

MobiusTable MobiusTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "load", "cannot open " + path);
  char magic[4];
  unsigned char header[8];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(header), 8);
  if (!in || std::memcmp(magic, "MU01", 4) != 0) fail(ErrorKind::Io, "load", "bad header in " + path);
  std::uint64_t limit = 0;
  for (int i = 0; i < 8; ++i) limit |= static_cast<std::uint64_t>(header[i]) << (8 * i);
  if (limit > static_cast<std::uint64_t>(kSieveLimit)) fail(ErrorKind::LimitExceeded, "load", "limit above 10^8");
  std::vector<std::int8_t> mu(limit + 1, 0);
  in.read(reinterpret_cast<char*>(mu.data() + 1), static_cast<std::streamsize>(limit));
  if (!in) fail(ErrorKind::Io, "load", "truncated table in " + path);
  return MobiusTable(static_cast<std::int64_t>(limit), std::move(mu));
}

MobiusTable mobius_sieve(std::int64_t N_max) {
  if (N_max < 1) fail(ErrorKind::Config, "mobius_sieve", "N_max must be positive");
  if (N_max > kSieveLimit) fail(ErrorKind::LimitExceeded, "mobius_sieve", "N_max=" + std::to_string(N_max) + " exceeds 10^8");
  std::int64_t root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(N_max)));
  while (root * root > N_max) --root;
  while ((root + 1) * (root + 1) <= N_max) ++root;
  const auto primes = small_primes(root);
  std::vector<std::int8_t> mu(static_cast<std::size_t>(N_max) + 1, 0);
  constexpr std::int64_t kSegment = 1 << 18;
  std::vector<std::uint32_t> rest(kSegment);
  std::vector<std::int8_t> sign(kSegment);
  for (std::int64_t lo = 1; lo <= N_max; lo += kSegment) {
    const std::int64_t hi = std::min(N_max, lo + kSegment - 1);
    const std::int64_t len = hi - lo + 1;
    for (std::int64_t i = 0; i < len; ++i) {
      rest[i] = static_cast<std::uint32_t>(lo + i);
      sign[i] = 1;
    }
    for (std::int64_t p : primes) {
      if (p * p > hi) break;
      for (std::int64_t m = (lo + p - 1) / p * p; m <= hi; m += p) {
        rest[m - lo] /= static_cast<std::uint32_t>(p);
        sign[m - lo] = static_cast<std::int8_t>(-sign[m - lo]);
      }
      const std::int64_t sq = p * p;
      for (std::int64_t m = (lo + sq - 1) / sq * sq; m <= hi; m += sq) sign[m - lo] = 0;
    }
    for (std::int64_t i = 0; i < len; ++i) {
      std::int8_t v = sign[i];
      if (rest[i] > 1) v = static_cast<std::int8_t>(-v);
      mu[static_cast<std::size_t>(lo + i)] = v;
    }
  }
  return MobiusTable(N_max, std::move(mu));
}

CorrelationReport correlation(const MobiusTable& mu, const std::vector<std::int64_t>& s,
                              const std::vector<std::int64_t>& checkpoints, std::string origin) {
  CorrelationReport rep;
  rep.origin = std::move(origin);
  std::vector<std::int64_t> sorted(checkpoints);
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty() && sorted.front() < 1) fail(ErrorKind::Config, "correlation", "checkpoints must be positive");
  if (!sorted.empty() && sorted.back() > mu.limit()) fail(ErrorKind::Domain, "correlation", "checkpoint beyond sieve limit");
  if (!sorted.empty() && sorted.back() > static_cast<std::int64_t>(s.size())) {
    fail(ErrorKind::Domain, "correlation", "checkpoint beyond word length");
  }
  std::int64_t sum = 0, n = 0;
  for (std::int64_t N : sorted) {
    for (; n < N; ++n) sum += mu(n + 1) * s[static_cast<std::size_t>(n)];
    rep.checkpoints.emplace_back(N, static_cast<double>(sum) / static_cast<double>(N));
    rep.sums.push_back(sum);
  }
  return rep;
}

std::vector<std::pair<std::int64_t, double>> dyadic_blocks(const MobiusTable& mu, const std::vector<std::int64_t>& s,
                                                           std::int64_t N) {
  if (N > mu.limit() || N > static_cast<std::int64_t>(s.size())) fail(ErrorKind::Domain, "dyadic_blocks", "N too large");
  std::vector<std::pair<std::int64_t, double>> out;
  for (std::int64_t M = 1; 2 * M - 1 <= N; M *= 2) {
    std::int64_t sum = 0;
    for (std::int64_t n = M; n < 2 * M; ++n) sum += mu(n) * s[static_cast<std::size_t>(n - 1)];
    out.emplace_back(M, static_cast<double>(sum) / static_cast<double>(M));
  }
  return out;
}

ShortIntervalRecord short_interval_sup(const MobiusTable& mu, const std::vector<std::int64_t>& s, std::int64_t N,
                                       std::int64_t H, int q_max) {
  if (H < 1 || q_max < 1) fail(ErrorKind::Config, "short_interval_sup", "need H >= 1 and q_max >= 1");
  if (H > N) fail(ErrorKind::Domain, "short_interval_sup", "need H <= N");
  if (N + H - 1 > mu.limit()) fail(ErrorKind::Domain, "short_interval_sup", "window beyond sieve limit");
  if (static_cast<std::int64_t>(s.size()) < H) fail(ErrorKind::Domain, "short_interval_sup", "word shorter than H");
  ShortIntervalRecord rec;
  rec.N = N;
  rec.H = H;
  rec.q_max = q_max;
  rec.in_regime = std::pow(static_cast<double>(N), 0.626) <= static_cast<double>(H);
  std::vector<std::int64_t> terms(static_cast<std::size_t>(H));
  for (std::int64_t h = 0; h < H; ++h) terms[h] = mu(N + h) * s[static_cast<std::size_t>(h)];
  std::int64_t best = 0;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    for (std::int64_t r = 0; r < q && r < H; ++r) {
      std::int64_t prefix = 0, lo = 0, hi = 0;
      for (std::int64_t h = r; h < H; h += q) {
        prefix += terms[h];
        lo = std::min(lo, prefix);
        hi = std::max(hi, prefix);
      }
      best = std::max(best, hi - lo);
    }
  }
  rec.sup = static_cast<double>(best) / static_cast<double>(H);
  return rec;
}

double decay_slope(const std::vector<std::pair<std::int64_t, double>>& checkpoints) {
  std::vector<double> x, y;
  for (const auto& [N, avg] : checkpoints) {
    if (avg == 0) continue;
    x.push_back(std::log(static_cast<double>(N)));
    y.push_back(std::log(std::abs(avg)));
  }
  if (x.size() < 2) fail(ErrorKind::TooShort, "decay_slope", "need two nonzero averages");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) fail(ErrorKind::DegenerateCurve, "decay_slope", "checkpoints coincide");
  return sxy / sxx;
}

}  // namespace bracketlab::mobius
