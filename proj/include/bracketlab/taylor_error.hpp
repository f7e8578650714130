// Error profiles e_N(h) = floor(f(N+h)) - floor(P_{N,ell}(h)) on a window
// [0, H), their small-N / sparse / structured classification, and censuses of
// distinct profiles over ranges of N.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bracketlab/hardy.hpp"

namespace bracketlab::taylor_error {

using exact::Integer;
using hardy::HardyExpr;
using hardy::TaylorModel;

struct ErrorProfile {
  Integer N;
  long H = 0;
  int ell = 0;
  std::vector<std::int64_t> values;
  TaylorModel taylor;
};

ErrorProfile error_profile(const HardyExpr& f, const Integer& N, int ell, long H);
ErrorProfile error_profile(hardy::TaylorExpander& expander, const Integer& N, int ell, long H);

struct Progression {
  long start = 0;
  long step = 1;
  long length = 0;
  std::int64_t value = 0;
};

enum class ClassKind { SmallN, Sparse, Structured, Overflow };
const char* to_string(ClassKind kind);

struct ClassifyOptions {
  double eta = 0.5;
  double eta0 = 0.1;        // epsilon = H^(-eta0)
  double sparse_cap = 3;    // support <= sparse_cap * H^eta
  double progression_cap = 3;
  long q_cap = 64;
  std::optional<long> seed_q;
};

struct Classification {
  ClassKind kind = ClassKind::Sparse;
  double threshold = 0;     // H^((ell + eta)/(ell - k))
  double epsilon = 0;
  std::vector<long> support;
  std::vector<Progression> progressions;
  long q = 0;
  ClassifyOptions options;
};

Classification classify(const ErrorProfile& profile, int k, const ClassifyOptions& options = {});

/// Progressions of the best q <= q_cap (ties to the smaller q); every residue
/// class is split greedily into maximal constant runs.
std::vector<Progression> decompose(const std::vector<std::int64_t>& values, long q);

struct CensusRecord {
  Integer N;
  ClassKind kind = ClassKind::Sparse;
  long support_size = 0;
  long progression_count = 0;
  long q = 0;
  double remainder_bound = 0;
  bool in_range = true;   // all |e_N(h)| <= 1
};

struct Census {
  long H = 0;
  int ell = 0;
  int k = 0;
  std::size_t distinct = 0;
  std::map<ClassKind, long> tally;
  long range_violations = 0;   // B <= epsilon but some |e_N(h)| > 1
  std::vector<CensusRecord> records;
};

/// Profiles at N = lo, lo + stride, ... < hi.
Census count_profiles(const HardyExpr& f, int k, int ell, long H, const Integer& lo, const Integer& hi,
                      long stride = 1, const ClassifyOptions& options = {});
/// Profiles at an explicit list of centres.
Census count_profiles(const HardyExpr& f, int k, int ell, long H, const std::vector<Integer>& centres,
                      const ClassifyOptions& options = {});

/// Least-squares slope and intercept of log(count) against H^eta.
std::pair<double, double> fit_census_growth(const std::vector<std::pair<long, std::size_t>>& counts, double eta);

/// Strict sign changes of consecutive differences, zero differences skipped.
int monotonicity_changes(const std::vector<double>& samples);

}  // namespace bracketlab::taylor_error
