#include "bracketlab/subword.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "bracketlab/errors.hpp"

namespace bracketlab::subword {

namespace {

[[noreturn]] void fail(ErrorKind kind, const char* op, const std::string& detail) {
  throw Error(kind, "subword", op, detail);
}

struct Dense {
  std::vector<std::uint32_t> codes;
  std::uint64_t sigma = 0;
};

Dense densify(const std::vector<std::int64_t>& letters) {
  std::vector<std::int64_t> alphabet(letters);
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  Dense d;
  d.sigma = alphabet.size();
  d.codes.reserve(letters.size());
  if (!alphabet.empty() && alphabet.front() >= 0 && alphabet.back() < 1024) {
    std::vector<std::uint32_t> table(static_cast<std::size_t>(alphabet.back()) + 1);
    for (std::size_t i = 0; i < alphabet.size(); ++i) table[static_cast<std::size_t>(alphabet[i])] = static_cast<std::uint32_t>(i);
    for (auto c : letters) d.codes.push_back(table[static_cast<std::size_t>(c)]);
  } else {
    for (auto c : letters) {
      d.codes.push_back(static_cast<std::uint32_t>(std::lower_bound(alphabet.begin(), alphabet.end(), c) - alphabet.begin()));
    }
  }
  return d;
}

// sigma^H, or 0 when it exceeds 2^62.
std::uint64_t block_space(std::uint64_t sigma, long H) {
  unsigned __int128 v = 1;
  for (long i = 0; i < H; ++i) {
    v *= sigma;
    if (v > (static_cast<unsigned __int128>(1) << 62)) return 0;
  }
  return static_cast<std::uint64_t>(v);
}

constexpr std::uint64_t kMod = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  std::uint64_t r = static_cast<std::uint64_t>(p & kMod) + static_cast<std::uint64_t>(p >> 61);
  if (r >= kMod) r -= kMod;
  return r;
}

std::uint64_t addmod(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = a + b;
  if (r >= kMod) r -= kMod;
  return r;
}

std::uint64_t submod(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kMod - b; }

std::uint64_t count_packed_bitmap(const std::vector<std::uint32_t>& s, long H, std::uint64_t sigma, std::uint64_t space) {
  std::vector<std::uint64_t> bits(space / 64 + 1, 0);
  const std::uint64_t lead = space / sigma;
  std::uint64_t code = 0, count = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i >= static_cast<std::size_t>(H)) code -= s[i - H] * lead;
    code = code * sigma + s[i];
    if (i + 1 >= static_cast<std::size_t>(H)) {
      std::uint64_t& w = bits[code >> 6];
      const std::uint64_t m = std::uint64_t{1} << (code & 63);
      if (!(w & m)) {
        w |= m;
        ++count;
      }
    }
  }
  return count;
}

std::uint64_t count_packed_sort(const std::vector<std::uint32_t>& s, long H, std::uint64_t sigma, std::uint64_t space) {
  std::vector<std::uint64_t> codes;
  codes.reserve(s.size() - H + 1);
  const std::uint64_t lead = space / sigma;
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i >= static_cast<std::size_t>(H)) code -= s[i - H] * lead;
    code = code * sigma + s[i];
    if (i + 1 >= static_cast<std::size_t>(H)) codes.push_back(code);
  }
  std::sort(codes.begin(), codes.end());
  return static_cast<std::uint64_t>(std::unique(codes.begin(), codes.end()) - codes.begin());
}

std::uint64_t count_hashed(const std::vector<std::uint32_t>& s, long H) {
  constexpr std::uint64_t kB1 = 1000003, kB2 = 998244353;
  std::uint64_t p1 = 1, p2 = 1;
  for (long i = 0; i + 1 < H; ++i) {
    p1 = mulmod(p1, kB1);
    p2 = mulmod(p2, kB2);
  }
  struct KeyHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const noexcept {
      return static_cast<std::size_t>(k.first * 0x9E3779B97F4A7C15ULL ^ k.second);
    }
  };
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::vector<std::size_t>, KeyHash> seen;
  std::uint64_t h1 = 0, h2 = 0, count = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i >= static_cast<std::size_t>(H)) {
      h1 = submod(h1, mulmod(s[i - H] + 1, p1));
      h2 = submod(h2, mulmod(s[i - H] + 1, p2));
    }
    h1 = addmod(mulmod(h1, kB1), s[i] + 1);
    h2 = addmod(mulmod(h2, kB2), s[i] + 1);
    if (i + 1 < static_cast<std::size_t>(H)) continue;
    const std::size_t start = i + 1 - H;
    auto& reps = seen[{h1, h2}];
    const bool found = std::any_of(reps.begin(), reps.end(), [&](std::size_t r) {
      return std::equal(s.begin() + r, s.begin() + r + H, s.begin() + start);
    });
    if (!found) {
      reps.push_back(start);
      ++count;
    }
  }
  return count;
}

std::uint64_t count_dense(const Dense& d, long H) {
  const std::uint64_t space = block_space(d.sigma, H);
  if (space != 0 && space <= (std::uint64_t{1} << 27)) return count_packed_bitmap(d.codes, H, d.sigma, space);
  if (space != 0) return count_packed_sort(d.codes, H, d.sigma, space);
  return count_hashed(d.codes, H);
}

void check_h(std::size_t n, long H, const char* op) {
  if (H < 1) fail(ErrorKind::Config, op, "H must be at least 1");
  if (static_cast<std::size_t>(H) > n) {
    fail(ErrorKind::HTooLarge, op, "H=" + std::to_string(H) + " exceeds word length " + std::to_string(n));
  }
}

// Distinct factors of every length up to H_max via a suffix automaton.
std::vector<std::uint64_t> automaton_counts(const Dense& d, long H_max) {
  const std::size_t n = d.codes.size();
  const std::size_t sigma = d.sigma;
  std::vector<std::int32_t> next((2 * n + 1) * sigma, -1);
  std::vector<std::int32_t> link(2 * n + 1, -1);
  std::vector<std::int64_t> len(2 * n + 1, 0);
  std::int32_t size = 1, last = 0;
  for (std::uint32_t c : d.codes) {
    const std::int32_t cur = size++;
    len[cur] = len[last] + 1;
    std::int32_t p = last;
    while (p != -1 && next[p * sigma + c] == -1) {
      next[p * sigma + c] = cur;
      p = link[p];
    }
    if (p == -1) {
      link[cur] = 0;
    } else {
      const std::int32_t q = next[p * sigma + c];
      if (len[p] + 1 == len[q]) {
        link[cur] = q;
      } else {
        const std::int32_t clone = size++;
        len[clone] = len[p] + 1;
        std::copy_n(next.begin() + q * sigma, sigma, next.begin() + clone * sigma);
        link[clone] = link[q];
        while (p != -1 && next[p * sigma + c] == q) {
          next[p * sigma + c] = clone;
          p = link[p];
        }
        link[q] = link[cur] = clone;
      }
    }
    last = cur;
  }
  std::vector<std::int64_t> diff(static_cast<std::size_t>(H_max) + 2, 0);
  for (std::int32_t v = 1; v < size; ++v) {
    const std::int64_t lo = len[link[v]] + 1;
    const std::int64_t hi = std::min<std::int64_t>(len[v], H_max);
    if (lo > hi) continue;
    ++diff[lo];
    --diff[hi + 1];
  }
  std::vector<std::uint64_t> out(static_cast<std::size_t>(H_max));
  std::int64_t run = 0;
  for (long H = 1; H <= H_max; ++H) {
    run += diff[H];
    out[H - 1] = static_cast<std::uint64_t>(run);
  }
  return out;
}

struct LineFit {
  double slope = 0;
  double intercept = 0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
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
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace

std::string ComplexityCurve::to_csv() const {
  std::ostringstream os;
  os << "H,p\n";
  for (std::size_t i = 0; i < H.size(); ++i) os << H[i] << ',' << p[i] << '\n';
  return os.str();
}

std::uint64_t factor_count(const std::vector<std::int64_t>& letters, long H) {
  check_h(letters.size(), H, "factor_count");
  return count_dense(densify(letters), H);
}

std::uint64_t factor_count(const Word& word, long H) { return factor_count(word.letters, H); }

ComplexityCurve complexity_curve(const Word& word, long H_max) {
  const std::size_t n = word.size();
  if (H_max < 1) fail(ErrorKind::Config, "complexity_curve", "H_max must be at least 1");
  if (static_cast<std::size_t>(H_max) > n / 2) {
    fail(ErrorKind::HTooLarge, "complexity_curve",
         "H_max=" + std::to_string(H_max) + " exceeds half the prefix length " + std::to_string(n));
  }
  ComplexityCurve curve;
  curve.prefix_length = n;
  curve.origin = word.origin;
  const Dense d = densify(word.letters);
  if (d.sigma * n <= 4'000'000) {
    curve.p = automaton_counts(d, H_max);
  } else {
    for (long H = 1; H <= H_max; ++H) curve.p.push_back(count_dense(d, H));
  }
  for (long H = 1; H <= H_max; ++H) curve.H.push_back(H);
  return curve;
}

std::optional<EventualPeriod> detect_period(const std::vector<std::int64_t>& letters, std::size_t max_period) {
  const std::size_t n = letters.size();
  for (std::size_t q = 1; q <= max_period && q < n; ++q) {
    std::size_t pre = 0;
    for (std::size_t i = n - q; i-- > 0;) {
      if (letters[i] != letters[i + q]) {
        pre = i + 1;
        break;
      }
    }
    const std::size_t tail = n - pre;
    if (tail >= 2 * q && 2 * tail >= n) return EventualPeriod{pre, q};
  }
  return std::nullopt;
}

ParametricCount parametric_prefix_count(const gp::BracketExpr& expr, const gp::Coding& coding, int d, long N,
                                        std::uint64_t samples, std::uint64_t seed, long R) {
  if (samples < 1) fail(ErrorKind::Config, "parametric_prefix_count", "samples must be at least 1");
  if (d < 0 || N < 1 || R < 1) fail(ErrorKind::Config, "parametric_prefix_count", "need d >= 0, N >= 1, R >= 1");
  std::mt19937_64 rng(seed);
  const exact::ExactNumber root2 = exact::ExactNumber::from(exact::ConstantTag::sqrt(2));
  std::set<std::vector<std::int64_t>> words;
  ParametricCount out;
  out.samples = samples;
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::vector<exact::ExactNumber> coeff;
    for (int j = 0; j <= d; ++j) {
      exact::Rational c(static_cast<long>(rng() >> 48) * R, 65536);
      c.canonicalize();
      coeff.push_back(s % 2 == 0 ? exact::ExactNumber(c) : root2.scaled(c));
    }
    gp::IndexSource index;
    index.description = "floor(p(n))";
    index.map = [&coeff](long long n) {
      exact::ExactNumber value;
      exact::Rational power(1);
      for (const auto& c : coeff) {
        value = value + c.scaled(power);
        power *= static_cast<long>(n);
      }
      return exact::Real(value).floor_certified();
    };
    try {
      words.insert(gp::generate_word(expr, coding, index, N).letters);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::FloorUndecidable) throw;
      ++out.skipped;
    }
  }
  out.distinct = words.size();
  return out;
}

GrowthFit fit_growth(const ComplexityCurve& curve) {
  if (curve.H.size() < 4) fail(ErrorKind::TooShort, "fit_growth", "need at least four points");
  if (std::all_of(curve.p.begin(), curve.p.end(), [&](std::uint64_t v) { return v == curve.p.front(); })) {
    fail(ErrorKind::DegenerateCurve, "fit_growth", "p is constant");
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < curve.H.size(); ++i) {
    lx.push_back(std::log(static_cast<double>(curve.H[i])));
    ly.push_back(std::log(static_cast<double>(curve.p[i])));
  }
  GrowthFit fit;
  const LineFit poly = least_squares(lx, ly);
  fit.exponent = poly.slope;
  fit.poly_constant = poly.intercept;
  std::vector<double> poly_res;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    poly_res.push_back(ly[i] - (poly.intercept + poly.slope * lx[i]));
    ss += poly_res.back() * poly_res.back();
  }
  fit.rms_polynomial = std::sqrt(ss / static_cast<double>(lx.size()));
  fit.rms_stretched = std::numeric_limits<double>::infinity();

  std::vector<double> sx, sy, sly, sh;
  for (std::size_t i = 0; i < curve.H.size(); ++i) {
    if (curve.p[i] < 3) continue;
    sx.push_back(lx[i]);
    sy.push_back(std::log(ly[i]));
    sly.push_back(ly[i]);
    sh.push_back(static_cast<double>(curve.H[i]));
  }
  std::vector<double> str_res;
  if (sx.size() >= 2 && sx.front() != sx.back()) {
    const LineFit st = least_squares(sx, sy);
    fit.delta = st.slope;
    fit.stretched_constant = std::exp(st.intercept);
    ss = 0;
    for (std::size_t i = 0; i < sx.size(); ++i) {
      str_res.push_back(sly[i] - fit.stretched_constant * std::pow(sh[i], fit.delta));
      ss += str_res.back() * str_res.back();
    }
    if (fit.delta > 0 && fit.delta < 1) fit.rms_stretched = std::sqrt(ss / static_cast<double>(sx.size()));
  }
  if (fit.rms_stretched < fit.rms_polynomial) {
    fit.model = GrowthFit::Model::Stretched;
    fit.residuals = std::move(str_res);
  } else {
    fit.model = GrowthFit::Model::Polynomial;
    fit.residuals = std::move(poly_res);
  }
  return fit;
}

}  // namespace bracketlab::subword
