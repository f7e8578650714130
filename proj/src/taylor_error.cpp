#include "bracketlab/taylor_error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include "bracketlab/errors.hpp"

namespace bracketlab::taylor_error {

namespace {

[[noreturn]] void fail(ErrorKind kind, const char* op, const std::string& detail) {
  throw Error(kind, "taylor_error", op, detail);
}

std::int64_t to_i64(const Integer& v) {
  if (!v.fits_slong_p()) fail(ErrorKind::Domain, "error_profile", "profile value out of range");
  return v.get_si();
}

}  // namespace

const char* to_string(ClassKind kind) {
  switch (kind) {
    case ClassKind::SmallN: return "small_n";
    case ClassKind::Sparse: return "sparse";
    case ClassKind::Structured: return "structured";
    case ClassKind::Overflow: return "overflow";
  }
  return "";
}

ErrorProfile error_profile(hardy::TaylorExpander& expander, const Integer& N, int ell, long H) {
  if (H < 1) fail(ErrorKind::Config, "error_profile", "H must be at least 1");
  ErrorProfile p;
  p.N = N;
  p.H = H;
  p.ell = ell;
  p.taylor = expander.model(N, ell, H);
  p.values.reserve(static_cast<std::size_t>(H));
  const HardyExpr& f = expander.function();
  for (long h = 0; h < H; ++h) {
    try {
      const Integer lhs = f.floor_at(N + h);
      const Integer rhs = p.taylor.eval(exact::Real(static_cast<long long>(h))).floor_certified();
      p.values.push_back(to_i64(lhs - rhs));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::FloorUndecidable) throw;
      fail(ErrorKind::FloorUndecidable, "error_profile",
           "N=" + N.get_str() + ", h=" + std::to_string(h) + ": " + e.what());
    }
  }
  return p;
}

ErrorProfile error_profile(const HardyExpr& f, const Integer& N, int ell, long H) {
  hardy::TaylorExpander ex(f);
  return error_profile(ex, N, ell, H);
}

std::vector<Progression> decompose(const std::vector<std::int64_t>& values, long q) {
  if (q < 1) fail(ErrorKind::Config, "decompose", "step must be positive");
  std::vector<Progression> out;
  const long H = static_cast<long>(values.size());
  for (long r = 0; r < std::min(q, H); ++r) {
    Progression cur{r, q, 1, values[r]};
    for (long h = r + q; h < H; h += q) {
      if (values[h] == cur.value) {
        ++cur.length;
      } else {
        out.push_back(cur);
        cur = {h, q, 1, values[h]};
      }
    }
    out.push_back(cur);
  }
  return out;
}

Classification classify(const ErrorProfile& profile, int k, const ClassifyOptions& options) {
  if (profile.ell <= k) fail(ErrorKind::Domain, "classify", "need ell > k");
  const double H = static_cast<double>(profile.H);
  Classification c;
  c.options = options;
  c.threshold = std::pow(H, (profile.ell + options.eta) / (profile.ell - k));
  c.epsilon = std::pow(H, -options.eta0);
  for (long h = 0; h < profile.H; ++h) {
    if (profile.values[h] != 0) c.support.push_back(h);
  }
  if (profile.N.get_d() <= c.threshold) {
    c.kind = ClassKind::SmallN;
    return c;
  }
  const double scale = std::pow(H, options.eta);
  if (static_cast<double>(c.support.size()) <= options.sparse_cap * scale) {
    c.kind = ClassKind::Sparse;
    return c;
  }
  std::vector<long> steps;
  if (options.seed_q && *options.seed_q >= 1) steps.push_back(*options.seed_q);
  for (long q = 1; q <= options.q_cap; ++q) steps.push_back(q);
  std::vector<Progression> best;
  long best_q = 0;
  for (long q : steps) {
    auto progs = decompose(profile.values, q);
    if (best_q == 0 || progs.size() < best.size() || (progs.size() == best.size() && q < best_q)) {
      best = std::move(progs);
      best_q = q;
    }
  }
  c.q = best_q;
  c.progressions = std::move(best);
  c.kind = static_cast<double>(c.progressions.size()) <= options.progression_cap * scale ? ClassKind::Structured
                                                                                          : ClassKind::Overflow;
  return c;
}

namespace {

Census run_census(const HardyExpr& f, int k, int ell, long H, const std::vector<Integer>& centres,
                  const ClassifyOptions& options) {
  Census census;
  census.H = H;
  census.ell = ell;
  census.k = k;
  hardy::TaylorExpander expander(f);
  std::unordered_set<std::string> seen;
  const double epsilon = std::pow(static_cast<double>(H), -options.eta0);
  for (const Integer& N : centres) {
    const ErrorProfile p = error_profile(expander, N, ell, H);
    const Classification c = classify(p, k, options);
    CensusRecord rec;
    rec.N = N;
    rec.kind = c.kind;
    rec.support_size = static_cast<long>(c.support.size());
    rec.progression_count = static_cast<long>(c.progressions.size());
    rec.q = c.q;
    rec.remainder_bound = p.taylor.remainder_bound;
    rec.in_range = std::all_of(p.values.begin(), p.values.end(), [](std::int64_t v) { return v >= -1 && v <= 1; });
    if (p.taylor.remainder_bound <= epsilon && !rec.in_range) ++census.range_violations;
    std::string key(p.values.size() * sizeof(std::int64_t), '\0');
    std::memcpy(key.data(), p.values.data(), key.size());
    seen.insert(std::move(key));
    ++census.tally[c.kind];
    census.records.push_back(std::move(rec));
  }
  census.distinct = seen.size();
  return census;
}

}  // namespace

Census count_profiles(const HardyExpr& f, int k, int ell, long H, const Integer& lo, const Integer& hi, long stride,
                      const ClassifyOptions& options) {
  if (stride < 1) fail(ErrorKind::Config, "count_profiles", "stride must be positive");
  if (hi <= lo) fail(ErrorKind::Config, "count_profiles", "empty N range");
  std::vector<Integer> centres;
  for (Integer N = lo; N < hi; N += stride) centres.push_back(N);
  return run_census(f, k, ell, H, centres, options);
}

Census count_profiles(const HardyExpr& f, int k, int ell, long H, const std::vector<Integer>& centres,
                      const ClassifyOptions& options) {
  std::vector<Integer> sorted = centres;
  std::sort(sorted.begin(), sorted.end());
  return run_census(f, k, ell, H, sorted, options);
}

std::pair<double, double> fit_census_growth(const std::vector<std::pair<long, std::size_t>>& counts, double eta) {
  if (counts.size() < 2) fail(ErrorKind::TooShort, "fit_census_growth", "need at least two H values");
  double mx = 0, my = 0;
  const double n = static_cast<double>(counts.size());
  for (const auto& [H, c] : counts) {
    mx += std::pow(static_cast<double>(H), eta);
    my += std::log(static_cast<double>(c));
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (const auto& [H, c] : counts) {
    const double x = std::pow(static_cast<double>(H), eta) - mx;
    sxy += x * (std::log(static_cast<double>(c)) - my);
    sxx += x * x;
  }
  if (sxx == 0) fail(ErrorKind::DegenerateCurve, "fit_census_growth", "all H values coincide");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

int monotonicity_changes(const std::vector<double>& samples) {
  if (samples.size() < 3) fail(ErrorKind::TooShort, "monotonicity_changes", "need at least three samples");
  int changes = 0;
  int last = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double d = samples[i] - samples[i - 1];
    const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace bracketlab::taylor_error
