// Factor counting and complexity curves of finite words.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bracketlab/gp.hpp"

namespace bracketlab::subword {

using gp::Word;

struct ComplexityCurve {
  std::vector<long> H;
  std::vector<std::uint64_t> p;
  std::size_t prefix_length = 0;
  std::string origin;

  /// "H,p" header then one row per point.
  std::string to_csv() const;
};

/// Number of distinct length-H blocks. Exact for every path.
std::uint64_t factor_count(const Word& word, long H);
std::uint64_t factor_count(const std::vector<std::int64_t>& letters, long H);

/// p(H) for H = 1..H_max (H_max <= length/2).
ComplexityCurve complexity_curve(const Word& word, long H_max);

struct EventualPeriod {
  std::size_t preperiod = 0;
  std::size_t period = 0;
};

/// Smallest period q <= max_period such that the tail from the preperiod on is
/// q-periodic and covers at least half the word and two full periods.
std::optional<EventualPeriod> detect_period(const std::vector<std::int64_t>& letters, std::size_t max_period);

struct ParametricCount {
  std::uint64_t distinct = 0;
  std::uint64_t samples = 0;
  std::uint64_t skipped = 0;  // FloorUndecidable
};

/// Distinct words (a(floor(p(n))))_{n<N} over `samples` random p of degree <= d.
/// Even draws use coefficients u/2^16 * R, odd draws sqrt(2) times such a value.
ParametricCount parametric_prefix_count(const gp::BracketExpr& expr, const gp::Coding& coding, int d, long N,
                                        std::uint64_t samples, std::uint64_t seed, long R = 4);

struct GrowthFit {
  enum class Model { Polynomial, Stretched };
  Model model = Model::Polynomial;
  double exponent = 0;        // C in p ~ c H^C
  double poly_constant = 0;   // log c
  double delta = 0;           // p ~ exp(c H^delta)
  double stretched_constant = 0;
  double rms_polynomial = 0;  // residuals measured in log p
  double rms_stretched = 0;   // +inf when the stretched model is unavailable
  std::vector<double> residuals;
};

/// Needs at least four points; the stretched model uses points with p >= 3
/// and only competes when its delta lies in (0, 1).
GrowthFit fit_growth(const ComplexityCurve& curve);

}  // namespace bracketlab::subword
