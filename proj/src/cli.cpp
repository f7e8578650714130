#include "bracketlab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "bracketlab/equidist.hpp"
#include "bracketlab/errors.hpp"
#include "bracketlab/exactreal.hpp"
#include "bracketlab/gp.hpp"
#include "bracketlab/hardy.hpp"
#include "bracketlab/mobius.hpp"
#include "bracketlab/nilheis.hpp"
#include "bracketlab/subword.hpp"
#include "bracketlab/taylor_error.hpp"

namespace bracketlab::cli {

namespace {

using json = nlohmann::ordered_json;
using exact::ExactNumber;
using exact::Integer;
using exact::Rational;
using exact::Real;

struct Options {
  std::string f = "t";
  std::string word;
  std::string coding = "id";
  std::string gp;
  std::string format;
  std::string out;
  std::string points;
  std::string beta;
  std::string poly;
  std::string alpha = "sqrt(2)";
  std::string coeffs;
  std::string g0 = "0,0,0";
  std::string g1 = "0,0,0";
  std::string g2 = "0,0,0";
  std::string method = "grid";
  std::string preset = "default";
  std::string checkpoints;
  std::string sieve_file;
  long long n = 0;
  long long nmin = 1000;
  long long nmax = 0;
  long long hmax = 0;
  long long stride = 1;
  long long count = 1;
  long long sieve = 0;
  long long budget = 1'000'000;
  long long samples = 0;
  int ell = 0;
  int k = -1;
  int qmax = 50;
  int degree = 2;
  double eta = 0.5;
  double delta = 0.05;
  double eps = 0.01;
  std::uint64_t seed = 0;
  bool seeded = false;
};

[[noreturn]] void config_error(const std::string& op, const std::string& detail) {
  throw Error(ErrorKind::Config, "cli", op, detail);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  for (auto& s : out) {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
  }
  return out;
}

std::vector<long long> parse_int_list(const std::string& text, const char* what) {
  std::vector<long long> out;
  for (const auto& s : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      config_error(what, "not an integer: '" + s + "'");
    }
  }
  return out;
}

// Decimal literals become exact rationals; anything else goes through the constant parser.
ExactNumber parse_number(const std::string& text) {
  const auto dot = text.find('.');
  if (dot != std::string::npos && text.find_first_not_of("+-0123456789.") == std::string::npos) {
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    if (digits == "-" || digits.empty()) config_error("parse_number", "bad decimal '" + text + "'");
    Integer den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    Rational q(Integer(digits), den);
    q.canonicalize();
    return q;
  }
  const gp::BracketExpr expr = gp::parse_gp(text);
  if (expr.has_var()) config_error("parse_number", "'" + text + "' is not a constant");
  const Real value = gp::eval_gp(expr, 0);
  if (!value.is_exact()) config_error("parse_number", "'" + text + "' has no exact form");
  return *value.exact();
}

std::vector<ExactNumber> parse_number_list(const std::string& text) {
  std::vector<ExactNumber> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_number(s));
  return out;
}

nilheis::HeisElement parse_heis(const std::string& text) {
  const auto v = parse_number_list(text);
  if (v.size() != 3) config_error("parse_heis", "expected three coordinates in '" + text + "'");
  return {Real(v[0]), Real(v[1]), Real(v[2])};
}

class Report {
 public:
  Report(const Options& o, std::string default_format, json config) : out_path_(o.out) {
    format_ = o.format.empty() ? std::move(default_format) : o.format;
    if (format_ != "csv" && format_ != "jsonl") config_error("report", "format must be csv or jsonl");
    config["format"] = format_;
    if (format_ == "csv") {
      body_ << "# config " << config.dump() << '\n';
    } else {
      body_ << json{{"config", config}}.dump() << '\n';
    }
  }

  bool csv() const { return format_ == "csv"; }
  std::ostream& raw() { return body_; }
  void record(const json& j) { body_ << j.dump() << '\n'; }

  void finish(std::ostream& out) {
    if (out_path_.empty()) {
      out << body_.str();
      return;
    }
    std::ofstream file(out_path_, std::ios::binary);
    if (!file) throw Error(ErrorKind::Io, "cli", "report", "cannot open " + out_path_);
    file << body_.str();
    std::ofstream meta(out_path_ + ".meta.json", std::ios::binary);
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    meta << json{{"report", out_path_}, {"created", ts.str()}}.dump() << '\n';
  }

 private:
  std::string out_path_;
  std::string format_;
  std::ostringstream body_;
};

std::string real_text(const Real& x) {
  if (auto q = x.as_rational()) return q->get_str();
  return x.to_string(20);
}

gp::IndexSource index_source(const Options& o) {
  if (o.f == "t" || o.f.empty()) return gp::IndexSource::identity();
  return hardy::floor_index(hardy::parse_hardy(o.f));
}

// Letters of the word for positions start .. start+count-1.
gp::Word build_word(const Options& o, long long count, long long start, const mobius::MobiusTable* mu) {
  if (o.word.empty()) config_error("word", "--word is required");
  const gp::IndexSource index = index_source(o);
  if (o.word == "const0" || o.word == "const1") {
    gp::Word w;
    const std::int64_t v = o.word == "const1" ? 1 : 0;
    w.letters.assign(static_cast<std::size_t>(count), v);
    w.alphabet = {v};
    w.names[v] = std::to_string(v);
    w.origin = o.word;
    return w;
  }
  if (o.word == "mu") {
    if (!mu) config_error("word", "the mu word needs a sieve");
    gp::Word w;
    for (long long n = start; n < start + count; ++n) {
      const Integer m = index.map(n);
      if (!m.fits_slong_p()) config_error("word", "index beyond sieve");
      w.letters.push_back((*mu)(m.get_si()));
    }
    w.alphabet = {-1, 0, 1};
    w.origin = "mu along " + index.description;
    return w;
  }
  gp::BracketExpr expr;
  gp::Coding coding = gp::parse_coding(o.coding);
  if (o.word.rfind("sturmian", 0) == 0) {
    std::istringstream is(o.word.substr(8));
    std::string a, b = "0";
    is >> a >> b;
    if (a.empty()) config_error("word", "sturmian needs alpha");
    expr = gp::sturmian_expr(gp::parse_gp(a), gp::parse_gp(b));
  } else {
    expr = gp::parse_gp(o.word);
  }
  return gp::generate_word(expr, coding, index, count, start);
}

Integer big(long long v) { return Integer(static_cast<long>(v)); }

json base_config(const std::string& command) { return json{{"command", command}}; }

int cmd_eval(const Options& o, std::ostream& out) {
  if (o.gp.empty()) config_error("eval", "--gp is required");
  if (o.count < 1) config_error("eval", "--count must be positive");
  const gp::BracketExpr expr = gp::parse_gp(o.gp);
  gp::Evaluator ev(expr);
  if (o.out.empty() && o.format.empty()) {
    for (long long n = o.n; n < o.n + o.count; ++n) out << real_text(ev(n)) << '\n';
    return 0;
  }
  json cfg = base_config("eval");
  cfg["gp"] = expr.to_string();
  cfg["n"] = o.n;
  cfg["count"] = o.count;
  Report rep(o, "jsonl", cfg);
  if (rep.csv()) rep.raw() << "n,value\n";
  for (long long n = o.n; n < o.n + o.count; ++n) {
    const std::string v = real_text(ev(n));
    if (rep.csv()) {
      rep.raw() << n << ',' << v << '\n';
    } else {
      rep.record({{"n", n}, {"value", v}});
    }
  }
  rep.finish(out);
  return 0;
}

struct KEll {
  int k;
  int ell;
};

KEll resolve_k_ell(const Options& o, const hardy::HardyExpr& f) {
  KEll r{o.k, 0};
  if (r.k < 0) r.k = hardy::growth_order(f).k;
  r.ell = hardy::choose_order(r.k, o.ell, o.preset);
  return r;
}

json taylor_json(const hardy::TaylorModel& m) {
  json coeffs = json::array();
  for (const auto& c : m.coefficients) coeffs.push_back(c.to_string(20));
  return {{"center", m.center.get_str()}, {"order", m.order},       {"window", m.window},
          {"coefficients", coeffs},       {"remainder_bound", m.remainder_bound}, {"sup_method", m.sup_method}};
}

int cmd_taylor(const Options& o, std::ostream& out) {
  const hardy::HardyExpr f = hardy::parse_hardy(o.f);
  if (o.hmax < 1) config_error("taylor", "--hmax must be positive");
  const KEll ke = resolve_k_ell(o, f);
  json cfg = base_config("taylor");
  cfg["f"] = f.to_string();
  cfg["n"] = o.n;
  cfg["k"] = ke.k;
  cfg["ell"] = ke.ell;
  cfg["hmax"] = o.hmax;
  Report rep(o, "jsonl", cfg);
  for (const auto& w : f.warnings()) rep.record({{"warning", w}});
  const auto m = hardy::taylor_model(f, big(o.n), ke.ell, static_cast<long>(o.hmax));
  rep.record(taylor_json(m));
  rep.finish(out);
  return 0;
}

taylor_error::ClassifyOptions classify_options(const Options& o) {
  taylor_error::ClassifyOptions c;
  c.eta = o.eta;
  c.q_cap = o.qmax;
  return c;
}

std::string values_text(const std::vector<std::int64_t>& v) {
  std::string s;
  for (auto x : v) s += x < 0 ? '-' : static_cast<char>('0' + std::min<std::int64_t>(x, 9));
  return s;
}

int cmd_classify(const Options& o, std::ostream& out) {
  const hardy::HardyExpr f = hardy::parse_hardy(o.f);
  if (o.hmax < 1) config_error("classify", "--hmax must be positive");
  const KEll ke = resolve_k_ell(o, f);
  json cfg = base_config("classify");
  cfg["f"] = f.to_string();
  cfg["n"] = o.n;
  cfg["k"] = ke.k;
  cfg["ell"] = ke.ell;
  cfg["hmax"] = o.hmax;
  cfg["eta"] = o.eta;
  cfg["qmax"] = o.qmax;
  Report rep(o, "jsonl", cfg);
  const auto p = taylor_error::error_profile(f, big(o.n), ke.ell, static_cast<long>(o.hmax));
  const auto c = taylor_error::classify(p, ke.k, classify_options(o));
  rep.record({{"N", p.N.get_str()},
              {"kind", taylor_error::to_string(c.kind)},
              {"threshold", c.threshold},
              {"epsilon", c.epsilon},
              {"support", c.support.size()},
              {"progressions", c.progressions.size()},
              {"q", c.q},
              {"remainder_bound", p.taylor.remainder_bound},
              {"profile", values_text(p.values)}});
  rep.finish(out);
  return 0;
}

int cmd_census(const Options& o, std::ostream& out) {
  const hardy::HardyExpr f = hardy::parse_hardy(o.f);
  if (o.hmax < 1) config_error("census", "--hmax must be positive");
  if (o.nmax <= o.nmin) config_error("census", "need --nmax > --nmin");
  const KEll ke = resolve_k_ell(o, f);
  json cfg = base_config("census");
  cfg["f"] = f.to_string();
  cfg["k"] = ke.k;
  cfg["ell"] = ke.ell;
  cfg["hmax"] = o.hmax;
  cfg["nmin"] = o.nmin;
  cfg["nmax"] = o.nmax;
  cfg["stride"] = o.stride;
  cfg["eta"] = o.eta;
  cfg["qmax"] = o.qmax;
  Report rep(o, "jsonl", cfg);
  const auto census = taylor_error::count_profiles(f, ke.k, ke.ell, static_cast<long>(o.hmax), big(o.nmin),
                                                   big(o.nmax), static_cast<long>(o.stride), classify_options(o));
  if (rep.csv()) rep.raw() << "N,kind,support,progressions,q,remainder_bound,in_range\n";
  for (const auto& r : census.records) {
    if (rep.csv()) {
      rep.raw() << r.N.get_str() << ',' << taylor_error::to_string(r.kind) << ',' << r.support_size << ','
                << r.progression_count << ',' << r.q << ',' << r.remainder_bound << ',' << (r.in_range ? 1 : 0) << '\n';
    } else {
      rep.record({{"N", r.N.get_str()},
                  {"kind", taylor_error::to_string(r.kind)},
                  {"support", r.support_size},
                  {"progressions", r.progression_count},
                  {"q", r.q},
                  {"remainder_bound", r.remainder_bound},
                  {"in_range", r.in_range}});
    }
  }
  if (!rep.csv()) {
    json tally = json::object();
    for (const auto& [kind, n] : census.tally) tally[taylor_error::to_string(kind)] = n;
    rep.record({{"summary", {{"distinct", census.distinct}, {"tally", tally}, {"range_violations", census.range_violations}}}});
  }
  rep.finish(out);
  return 0;
}

int cmd_complexity(const Options& o, std::ostream& out) {
  if (o.nmax < 2) config_error("complexity", "--nmax must be at least 2");
  if (o.samples > 0) {
    if (!o.seeded) config_error("complexity", "--seed is required with --samples");
    if (o.word.empty()) config_error("complexity", "--word is required");
    json cfg = base_config("complexity");
    cfg["word"] = o.word;
    cfg["coding"] = o.coding;
    cfg["degree"] = o.degree;
    cfg["nmax"] = o.nmax;
    cfg["samples"] = o.samples;
    cfg["seed"] = o.seed;
    Report rep(o, "jsonl", cfg);
    gp::BracketExpr expr;
    if (o.word.rfind("sturmian", 0) == 0) {
      std::istringstream is(o.word.substr(8));
      std::string a, b = "0";
      is >> a >> b;
      expr = gp::sturmian_expr(gp::parse_gp(a), gp::parse_gp(b));
    } else {
      expr = gp::parse_gp(o.word);
    }
    const auto pc = subword::parametric_prefix_count(expr, gp::parse_coding(o.coding), o.degree, static_cast<long>(o.nmax),
                                                     static_cast<std::uint64_t>(o.samples), o.seed);
    if (rep.csv()) {
      rep.raw() << "N,distinct,samples,skipped\n" << o.nmax << ',' << pc.distinct << ',' << pc.samples << ',' << pc.skipped << '\n';
    } else {
      rep.record({{"N", o.nmax}, {"distinct", pc.distinct}, {"samples", pc.samples}, {"skipped", pc.skipped}});
    }
    rep.finish(out);
    return 0;
  }
  const long long hmax = o.hmax > 0 ? o.hmax : std::min<long long>(o.nmax / 2, 200);
  json cfg = base_config("complexity");
  cfg["word"] = o.word;
  cfg["f"] = o.f;
  cfg["coding"] = o.coding;
  cfg["nmax"] = o.nmax;
  cfg["hmax"] = hmax;
  Report rep(o, "csv", cfg);
  std::optional<mobius::MobiusTable> mu;
  if (o.word == "mu") mu = o.sieve > 0 ? mobius::mobius_sieve(o.sieve) : mobius::mobius_sieve(std::max<long long>(o.nmax, 2) * 64);
  const gp::Word w = build_word(o, o.nmax, o.word == "mu" ? 1 : 0, mu ? &*mu : nullptr);
  const auto curve = subword::complexity_curve(w, static_cast<long>(hmax));
  if (rep.csv()) {
    rep.raw() << curve.to_csv();
  } else {
    for (std::size_t i = 0; i < curve.H.size(); ++i) rep.record({{"H", curve.H[i]}, {"p", curve.p[i]}});
    try {
      const auto fit = subword::fit_growth(curve);
      json j{{"model", fit.model == subword::GrowthFit::Model::Polynomial ? "polynomial" : "stretched"},
             {"exponent", fit.exponent},
             {"rms_polynomial", fit.rms_polynomial}};
      if (fit.model == subword::GrowthFit::Model::Stretched) {
        j["delta"] = fit.delta;
        j["constant"] = fit.stretched_constant;
        j["rms_stretched"] = fit.rms_stretched;
      }
      rep.record({{"fit", j}});
    } catch (const Error& e) {
      rep.record({{"fit", {{"error", to_string(e.kind())}}}});
    }
  }
  rep.finish(out);
  return 0;
}

int cmd_discrepancy(const Options& o, std::ostream& out) {
  json cfg = base_config("discrepancy");
  equidist::DiscrepancyReport r;
  if (!o.points.empty()) {
    std::vector<Rational> pts;
    for (const auto& x : parse_number_list(o.points)) {
      auto q = x.as_rational();
      if (!q) config_error("discrepancy", "points must be rational");
      pts.push_back(*q);
    }
    cfg["points"] = o.points;
    Report rep(o, "jsonl", cfg);
    r = equidist::discrepancy(std::move(pts));
    rep.record({{"N", r.N}, {"D", r.D}, {"exact", r.value.get_str()},
                {"alpha", r.alpha.get_str()}, {"beta", r.beta.get_str()}, {"closed", r.closed}});
    rep.finish(out);
    return 0;
  }
  if (o.gp.empty() || o.nmax < 1) config_error("discrepancy", "need --points, or --gp with --nmax");
  const gp::BracketExpr expr = gp::parse_gp(o.gp);
  cfg["gp"] = expr.to_string();
  cfg["nmax"] = o.nmax;
  Report rep(o, "jsonl", cfg);
  gp::Evaluator ev(expr);
  std::vector<double> pts;
  for (long long n = 0; n < o.nmax; ++n) pts.push_back(ev(n).frac_certified().approx());
  r = equidist::discrepancy(pts);
  rep.record({{"N", r.N}, {"D", r.D}, {"alpha", r.alpha.get_d()}, {"beta", r.beta.get_d()}, {"closed", r.closed}});
  rep.finish(out);
  return 0;
}

int cmd_weyl(const Options& o, std::ostream& out) {
  if (o.beta.empty()) config_error("weyl", "--beta is required");
  const long long N = o.nmax > 0 ? o.nmax : 10000;
  const auto beta = parse_number_list(o.beta);
  json cfg = base_config("weyl");
  json b = json::array();
  for (const auto& x : beta) b.push_back(x.to_string());
  cfg["beta"] = b;
  cfg["nmax"] = N;
  cfg["delta"] = o.delta;
  Report rep(o, "jsonl", cfg);
  const auto w = equidist::weyl_dichotomy(beta, static_cast<long>(N), o.delta);
  json j{{"equidistributed", w.equidistributed}, {"discrepancy", w.discrepancy}};
  if (!w.equidistributed) {
    j["ell"] = w.ell;
    j["defects"] = w.defects;
    j["max_defect"] = w.max_defect;
  }
  rep.record(j);
  rep.finish(out);
  return 0;
}

int cmd_sublevel(const Options& o, std::ostream& out) {
  if (o.poly.empty()) config_error("sublevel", "--poly is required");
  equidist::SublevelMethod method;
  if (o.method == "grid") {
    method = equidist::SublevelMethod::Grid;
  } else if (o.method == "mc") {
    method = equidist::SublevelMethod::MonteCarlo;
    if (!o.seeded) config_error("sublevel", "--seed is required for the mc method");
  } else {
    config_error("sublevel", "--method must be grid or mc");
  }
  const auto p = equidist::Polynomial::from_json(o.poly);
  json cfg = base_config("sublevel");
  cfg["poly"] = o.poly;
  cfg["eps"] = o.eps;
  cfg["method"] = o.method;
  cfg["budget"] = o.budget;
  if (method == equidist::SublevelMethod::MonteCarlo) cfg["seed"] = o.seed;
  Report rep(o, "jsonl", cfg);
  const auto r = equidist::sublevel_measure(p, o.eps, method, static_cast<std::uint64_t>(o.budget), o.seed);
  const auto eq = equidist::coefficient_sup_equivalence(p);
  rep.record({{"epsilon", r.epsilon}, {"measure", r.measure}, {"error_bar", r.error_bar},
              {"evaluations", r.cells_or_samples}, {"sup", eq.sup}, {"max_coef", eq.max_coef}});
  rep.finish(out);
  return 0;
}

int cmd_nil(const Options& o, std::ostream& out) {
  const long long N = o.nmax > 0 ? o.nmax : 1000;
  const nilheis::NilPolySeq seq(parse_heis(o.g0), parse_heis(o.g1), parse_heis(o.g2));
  json cfg = base_config("nil");
  cfg["g0"] = o.g0;
  cfg["g1"] = o.g1;
  cfg["g2"] = o.g2;
  cfg["nmax"] = N;
  Report rep(o, "csv", cfg);
  const auto orbit = nilheis::poly_orbit(seq, static_cast<long>(N));
  if (rep.csv()) {
    rep.raw() << "n,x1,x2,x3\n" << std::setprecision(17);
    for (std::size_t n = 0; n < orbit.size(); ++n) {
      rep.raw() << n << ',' << orbit[n].point[0].approx() << ',' << orbit[n].point[1].approx() << ','
                << orbit[n].point[2].approx() << '\n';
    }
  } else {
    std::vector<std::array<double, 3>> pts;
    for (const auto& r : orbit) pts.push_back({r.point[0].approx(), r.point[1].approx(), r.point[2].approx()});
    const std::vector<std::array<long, 3>> freqs{{1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    const auto st = nilheis::orbit_equidistribution(pts, freqs);
    rep.record({{"frequencies", {{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}},
                {"magnitudes", st.magnitudes},
                {"box_discrepancy", st.box_discrepancy},
                {"box_depth", st.box_depth}});
  }
  rep.finish(out);
  return 0;
}

int cmd_mobius(const Options& o, std::ostream& out) {
  std::optional<mobius::MobiusTable> table;
  if (!o.sieve_file.empty() && o.sieve <= 0) {
    table = mobius::MobiusTable::load(o.sieve_file);
  } else {
    if (o.sieve < 1) config_error("mobius", "--sieve must be positive");
    table = mobius::mobius_sieve(o.sieve);
    if (!o.sieve_file.empty()) table->save(o.sieve_file);
  }
  std::vector<long long> cps = o.checkpoints.empty() ? std::vector<long long>{table->limit()}
                                                     : parse_int_list(o.checkpoints, "mobius");
  std::sort(cps.begin(), cps.end());
  const long long N = cps.back();
  json cfg = base_config("mobius");
  cfg["sieve"] = table->limit();
  cfg["word"] = o.word;
  cfg["f"] = o.f;
  cfg["coding"] = o.coding;
  cfg["checkpoints"] = cps;
  if (o.hmax > 0) {
    cfg["n"] = o.n;
    cfg["hmax"] = o.hmax;
    cfg["qmax"] = o.qmax;
  }
  Report rep(o, "csv", cfg);
  const gp::Word w = build_word(o, N, 1, &*table);
  const std::vector<std::int64_t> cp64(cps.begin(), cps.end());
  const auto corr = mobius::correlation(*table, w.letters, cp64, w.origin);
  if (rep.csv()) {
    rep.raw() << "N,avg\n" << std::setprecision(17);
    for (const auto& [n, avg] : corr.checkpoints) rep.raw() << n << ',' << avg << '\n';
  } else {
    for (std::size_t i = 0; i < corr.checkpoints.size(); ++i) {
      rep.record({{"N", corr.checkpoints[i].first}, {"avg", corr.checkpoints[i].second}, {"sum", corr.sums[i]}});
    }
  }
  if (o.hmax > 0) {
    const long long start = o.n > 0 ? o.n : N / 2;
    const gp::Word s = build_word(o, o.hmax, 0, &*table);
    const auto rec = mobius::short_interval_sup(*table, s.letters, start, o.hmax, o.qmax);
    const json j{{"N", rec.N}, {"H", rec.H}, {"q_max", rec.q_max}, {"sup", rec.sup}, {"in_regime", rec.in_regime}};
    if (rep.csv()) {
      rep.raw() << "# short_interval " << j.dump() << '\n';
    } else {
      rep.record({{"short_interval", j}});
    }
  }
  rep.finish(out);
  return 0;
}

int cmd_suspension(const Options& o, std::ostream& out) {
  if (o.coeffs.empty()) config_error("suspension", "--coeffs is required");
  const long long N = o.nmax > 0 ? o.nmax : 100;
  nilheis::SuspensionSystem sys{parse_number(o.alpha), parse_number_list(o.coeffs)};
  json cfg = base_config("suspension");
  cfg["alpha"] = sys.alpha.to_string();
  json c = json::array();
  for (const auto& x : sys.coefficients) c.push_back(x.to_string());
  cfg["coeffs"] = c;
  cfg["nmax"] = N;
  Report rep(o, "jsonl", cfg);
  if (rep.csv()) rep.raw() << "n,F,direct,agree\n";
  long mismatches = 0;
  for (long long n = 0; n < N; ++n) {
    const Real F = nilheis::suspension_eval(sys, big(n));
    const Real D = nilheis::suspension_direct(sys, big(n));
    const bool agree = (F - D).enclosure().width() <= std::ldexp(1.0, -64) &&
                       std::abs((F - D).approx()) <= std::ldexp(1.0, -64);
    if (!agree) ++mismatches;
    if (rep.csv()) {
      rep.raw() << n << ',' << F.to_string(20) << ',' << D.to_string(20) << ',' << (agree ? 1 : 0) << '\n';
    } else {
      rep.record({{"n", n}, {"F", F.to_string(20)}, {"direct", D.to_string(20)}, {"agree", agree}});
    }
  }
  if (!rep.csv()) rep.record({{"summary", {{"mismatches", mismatches}}}});
  rep.finish(out);
  return 0;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--f", o.f, "Hardy expression in t");
  sub->add_option("--word", o.word, "GP expression or preset: 'sturmian A B', const0, const1, mu");
  sub->add_option("--coding", o.coding, "id | mod m [labels] | cells [lo,hi)->a ...");
  sub->add_option("--gp", o.gp, "generalised polynomial in n");
  sub->add_option("--n", o.n, "centre or starting index");
  sub->add_option("--count", o.count, "number of evaluations");
  sub->add_option("--nmin", o.nmin, "lower end of the N range");
  sub->add_option("--nmax", o.nmax, "upper end of the N range or word length");
  sub->add_option("--hmax", o.hmax, "window length H or largest H");
  sub->add_option("--stride", o.stride, "step between census centres");
  sub->add_option("--ell", o.ell, "Taylor order");
  sub->add_option("--k", o.k, "growth order (estimated when omitted)");
  sub->add_option("--preset", o.preset, "order preset: default | 10k");
  sub->add_option("--eta", o.eta, "exponent eta");
  sub->add_option("--qmax", o.qmax, "largest progression step");
  sub->add_option("--seed", o.seed, "64-bit seed")->each([&o](const std::string&) { o.seeded = true; });
  sub->add_option("--out", o.out, "report path (stdout when omitted)");
  sub->add_option("--format", o.format, "csv | jsonl");
  sub->add_option("--points", o.points, "comma-separated points");
  sub->add_option("--beta", o.beta, "polynomial coefficients beta_0, beta_1, ...");
  sub->add_option("--delta", o.delta, "discrepancy threshold");
  sub->add_option("--poly", o.poly, "polynomial as nested JSON arrays");
  sub->add_option("--eps", o.eps, "sublevel epsilon");
  sub->add_option("--method", o.method, "grid | mc");
  sub->add_option("--budget", o.budget, "cells or samples");
  sub->add_option("--samples", o.samples, "random polynomials for parametric counts");
  sub->add_option("--degree", o.degree, "degree of random polynomials");
  sub->add_option("--alpha", o.alpha, "rotation number");
  sub->add_option("--coeffs", o.coeffs, "coefficients of p, constant term first");
  sub->add_option("--g0", o.g0, "Heisenberg element x1,x2,x3");
  sub->add_option("--g1", o.g1, "Heisenberg element x1,x2,x3");
  sub->add_option("--g2", o.g2, "central element 0,0,x3");
  sub->add_option("--sieve", o.sieve, "sieve limit");
  sub->add_option("--sieve-file", o.sieve_file, "binary sieve file to load or write");
  sub->add_option("--checkpoints", o.checkpoints, "comma-separated N values");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bracket words, generalised polynomials and nilsequences"};
  app.require_subcommand(1);
  Options o;
  using Handler = int (*)(const Options&, std::ostream&);
  const std::vector<std::pair<std::string, Handler>> commands{
      {"eval", cmd_eval},         {"taylor", cmd_taylor},   {"classify", cmd_classify}, {"census", cmd_census},
      {"complexity", cmd_complexity}, {"discrepancy", cmd_discrepancy}, {"weyl", cmd_weyl},
      {"sublevel", cmd_sublevel}, {"nil", cmd_nil},         {"mobius", cmd_mobius},     {"suspension", cmd_suspension}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, handler] : commands) subs.push_back(app.add_subcommand(name));
  for (auto* sub : subs) add_common(sub, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }
  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) return commands[i].second(o, out);
    }
    return 2;
  } catch (const Error& e) {
    err << e.what() << '\n';
    if (e.kind() == ErrorKind::FloorUndecidable) return 3;
    if (e.is_cap_violation()) return 4;
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace bracketlab::cli
