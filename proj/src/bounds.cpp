#include "cdp/bounds.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "cdp/parallel.hpp"

namespace cdp {

namespace {

mpz_class pow_z(const mpz_class& base, std::uint64_t e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

mpq_class pow_q(const mpq_class& base, std::uint64_t e) {
  mpq_class out(pow_z(base.get_num(), e), pow_z(base.get_den(), e));
  out.canonicalize();
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

mpq_class parse_rational(const std::string& text) {
  const auto bad = [&] { return std::invalid_argument("not a number: '" + text + "'"); };
  if (text.empty()) throw bad();
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const mpq_class num = parse_rational(text.substr(0, slash));
    const mpq_class den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return num / den;
  }
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') negative = text[i++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_digit = false, seen_point = false;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits += ch;
      seen_digit = true;
      if (seen_point) ++scale;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw bad();
  long exponent = 0;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') throw bad();
    std::size_t used = 0;
    try {
      exponent = std::stol(text.substr(i + 1), &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (i + 1 + used != text.size()) throw bad();
  }
  mpq_class out{mpz_class(digits, 10)};
  const long shift = exponent - scale;
  if (shift > 0) out *= pow_z(10, static_cast<std::uint64_t>(shift));
  if (shift < 0) out /= pow_z(10, static_cast<std::uint64_t>(-shift));
  out.canonicalize();
  return negative ? mpq_class(-out) : out;
}

mpq_class exact_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("exact_rational: non-finite value");
  return mpq_class(x);
}

mpq_class binom_cdf_exact(std::int64_t m, const mpq_class& p, std::int64_t k) {
  if (m < 0) throw std::invalid_argument("binom_cdf: m must be >= 0");
  if (k < 0) throw std::invalid_argument("binom_cdf: k must be >= 0");
  if (p < 0 || p > 1) throw std::invalid_argument("binom_cdf: p must lie in [0,1]");
  if (k >= m) return 1;
  // B = (q-a)^{m-k} * sum_{i<=k} C(m,i) a^i (q-a)^{k-i} / q^m with p = a/q.
  const mpz_class a = p.get_num(), q = p.get_den(), r = q - a;
  mpz_class inner = 0, binom = 1, a_pow = 1;
  for (std::int64_t i = 0; i <= k; ++i) {
    if (i > 0) {
      binom = binom * (m - i + 1) / i;
      a_pow *= a;
    }
    inner += binom * a_pow * pow_z(r, static_cast<std::uint64_t>(k - i));
  }
  mpq_class out(inner * pow_z(r, static_cast<std::uint64_t>(m - k)), pow_z(q, static_cast<std::uint64_t>(m)));
  out.canonicalize();
  return out;
}

double binom_cdf_float(std::int64_t m, double p, std::int64_t k) {
  if (m < 0) throw std::invalid_argument("binom_cdf: m must be >= 0");
  if (k < 0) throw std::invalid_argument("binom_cdf: k must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binom_cdf: p must lie in [0,1]");
  if (k >= m || p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  // P(X <= k) = I_{1-p}(m-k, k+1).
  return boost::math::ibetac(static_cast<double>(k + 1), static_cast<double>(m - k), p);
}

double binom_cdf(std::int64_t m, double p, std::int64_t k) {
  if (m <= kExactBinomialLimit) return binom_cdf_exact(m, exact_rational(p), k).get_d();
  return binom_cdf_float(m, p, k);
}

double poisson_cdf(double lambda, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("poisson_cdf: k must be >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("poisson_cdf: lambda must be >= 0");
  if (lambda == 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(k + 1), lambda);
}

mpq_class BoundParams::time() const { return c ? mpq_class(*c / d) : t; }

void BoundParams::validate() const {
  if (d < 2) throw std::invalid_argument("bound params: d must be >= 2");
  if (target_dim < 2) throw std::invalid_argument("bound params: target dimension must be >= 2");
  if (target_dim > d) throw std::invalid_argument("bound params: target dimension exceeds d");
  if (kappa < 2 * target_dim - 1) throw std::invalid_argument("bound params: need kappa >= 2d'-1");
  const mpq_class tt = time();
  if (tt < 0 || tt > 1) throw std::invalid_argument("bound params: t must lie in [0,1]");
}

SBValue s_b_of(const BoundParams& params) {
  params.validate();
  const mpq_class t = params.time();
  const int used = 2 * params.target_dim - 1;
  const std::int64_t m = 2 * static_cast<std::int64_t>(params.d) - used;
  const std::int64_t k = params.kappa - used;
  SBValue out;
  if (m <= kExactBinomialLimit) {
    out.s = binom_cdf_exact(m, t, k);
  } else {
    out.s = exact_rational(binom_cdf_float(m, t.get_d(), k));
    out.exact = false;
  }
  const mpq_class miss = pow_q(mpq_class(1 - t), static_cast<std::uint64_t>(params.d / params.target_dim));
  out.b = 1 - miss / out.s;
  return out;
}

ChenBounds chen_lower_bounds(double c, int kappa, double floor) {
  if (!(c > 0.0)) throw std::invalid_argument("chen bounds: c must be positive");
  if (kappa < 10) throw std::invalid_argument("chen bounds: kappa must be >= 10");
  if (!(floor >= 1.0)) throw std::invalid_argument("chen bounds: floor must be >= 1");
  ChenBounds out;
  out.s_lower = poisson_cdf(2.0 * c, kappa - 3) - c * (1.0 - std::exp(-2.0 * c)) / floor;
  out.b_lower = 1.0 - std::exp(-(c / 2.0) * (1.0 - 1.0 / floor)) / out.s_lower;
  return out;
}

std::string Thresholds::label() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "s>=%.4f,b>=%.4f", s.get_d(), b.get_d());
  return buf;
}

Thresholds generic_thresholds() { return {mpq_class(9765, 10000), mpq_class(5622, 10000)}; }

std::vector<Thresholds> table_thresholds() {
  return {{mpq_class(9809, 10000), mpq_class(5596, 10000)}, {mpq_class(9708, 10000), mpq_class(5806, 10000)}};
}

bool BoundReport::all_pass() const {
  if (entries.empty()) return false;
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

std::vector<const BoundEntry*> BoundReport::failures() const {
  std::vector<const BoundEntry*> out;
  for (const auto& e : entries)
    if (!e.pass) out.push_back(&e);
  return out;
}

namespace {

nlohmann::json entry_json(const BoundEntry& e) {
  return {{"d", e.d}, {"kappa", e.kappa}, {"t", e.t},         {"s", e.s},
          {"b", e.b}, {"method", e.method}, {"thresholds", e.thresholds}, {"pass", e.pass}};
}

}  // namespace

nlohmann::json BoundReport::to_json(bool include_entries) const {
  nlohmann::json j;
  j["name"] = name;
  j["all_pass"] = all_pass();
  j["checked"] = entries.size();
  j["failures"] = nlohmann::json::array();
  for (const auto* f : failures()) j["failures"].push_back(entry_json(*f));
  if (include_entries) {
    j["entries"] = nlohmann::json::array();
    for (const auto& e : entries) j["entries"].push_back(entry_json(e));
  }
  return j;
}

void BoundReport::write_csv(std::ostream& out) const {
  out << "d,kappa,t,s,b,method,thresholds,pass\n";
  for (const auto& e : entries)
    out << e.d << ',' << e.kappa << ',' << fmt(e.t) << ',' << fmt(e.s) << ',' << fmt(e.b) << ',' << e.method << ','
        << e.thresholds << ',' << (e.pass ? "PASS" : "FAIL") << '\n';
}

std::vector<TableCase> theorem1_table() {
  return {{4, 7}, {5, 8}, {6, 8}, {7, 9}, {8, 9}, {9, 9}, {10, 9}, {11, 9}, {12, 9}, {14, 9}, {16, 9}};
}

namespace {

bool meets(const SBValue& v, const Thresholds& th) {
  if (v.exact) return v.s >= th.s && v.b >= th.b;
  return v.s_value() - th.s.get_d() > -kFloatGuard && v.b_value() - th.b.get_d() > -kFloatGuard;
}

BoundEntry direct_entry(int d, int kappa, const mpq_class& c) {
  BoundParams params;
  params.d = d;
  params.kappa = kappa;
  params.c = c;
  const SBValue v = s_b_of(params);
  BoundEntry e;
  e.d = d;
  e.kappa = kappa;
  e.t = params.time().get_d();
  e.s = v.s_value();
  e.b = v.b_value();
  e.method = "direct";
  const Thresholds th = generic_thresholds();
  e.thresholds = th.label();
  e.pass = meets(v, th);
  return e;
}

struct EntryAcc {
  std::vector<BoundEntry> entries;
  void merge(EntryAcc& other) {
    entries.insert(entries.end(), std::make_move_iterator(other.entries.begin()),
                   std::make_move_iterator(other.entries.end()));
  }
};

}  // namespace

BoundReport verify_theorem1(const Theorem1Options& o) {
  if (o.kappa < 10) throw std::invalid_argument("verify-theorem1: kappa must be >= 10 outside the table cases");
  const int d_min = o.d_min == 0 ? o.kappa / 2 + 1 : o.d_min;
  if (2 * d_min <= o.kappa)
    throw std::invalid_argument("verify-theorem1: d = " + std::to_string(d_min) +
                                " violates d > kappa/2");
  if (o.d_max < d_min) throw std::invalid_argument("verify-theorem1: d-max below d-min");
  if (o.c <= 0) throw std::invalid_argument("verify-theorem1: c must be positive");

  BoundReport report;
  report.name = "theorem1";
  const int direct_max = static_cast<int>(std::min<double>(o.d_max, o.chen_floor));
  if (direct_max >= d_min) {
    const auto count = static_cast<std::uint64_t>(direct_max - d_min + 1);
    auto acc = parallel_accumulate<EntryAcc>(count, o.threads, [&](std::uint64_t i, EntryAcc& a) {
      a.entries.push_back(direct_entry(d_min + static_cast<int>(i), o.kappa, o.c));
    });
    report.entries = std::move(acc.entries);
  }
  if (o.d_max > o.chen_floor) {
    const ChenBounds chen = chen_lower_bounds(o.c.get_d(), o.kappa, o.chen_floor);
    const Thresholds th = generic_thresholds();
    BoundEntry e;
    e.d = static_cast<int>(o.chen_floor) + 1;
    e.kappa = o.kappa;
    e.t = 0.0;  // uniform in d > floor
    e.s = chen.s_lower;
    e.b = chen.b_lower;
    e.method = "chen";
    e.thresholds = th.label();
    e.pass = chen.s_lower - th.s.get_d() > kFloatGuard && chen.b_lower - th.b.get_d() > kFloatGuard;
    report.entries.push_back(e);
  }
  if (o.include_table) {
    auto table = verify_theorem1_table(o.c);
    report.entries.insert(report.entries.end(), table.entries.begin(), table.entries.end());
  }
  return report;
}

BoundReport verify_theorem1_table(const mpq_class& c) {
  BoundReport report;
  report.name = "theorem1-table";
  const auto pairs = table_thresholds();
  for (const auto& tc : theorem1_table()) {
    for (int kappa = tc.kappa_min; kappa <= 2 * tc.d; ++kappa) {
      BoundParams params;
      params.d = tc.d;
      params.kappa = kappa;
      params.c = c;
      const SBValue v = s_b_of(params);
      BoundEntry e;
      e.d = tc.d;
      e.kappa = kappa;
      e.t = params.time().get_d();
      e.s = v.s_value();
      e.b = v.b_value();
      e.method = "direct";
      e.thresholds = "none";
      for (const auto& th : pairs) {
        if (meets(v, th)) {
          e.thresholds = th.label();
          e.pass = true;
          break;
        }
      }
      report.entries.push_back(e);
    }
  }
  return report;
}

std::vector<InequalityMargin> verify_theorem3_inequalities(const mpq_class& t, const mpq_class& p) {
  if (t < 0 || t > 1 || p < 0 || p > 1) throw std::invalid_argument("comparison inequalities: need t, p in [0,1]");
  const mpq_class t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t, q = 1 - p;
  const mpq_class full3 = t3 - t5 + mpq_class(2, 6) * t5;
  const mpq_class full2 = t2 - t4 + mpq_class(2, 5) * t4;
  const mpq_class full1 = t - t3 + mpq_class(2, 4) * t3;
  std::vector<InequalityMargin> out;
  out.push_back({"X=3:N>=1", 3, 3 * t * (1 - t) * (1 - t) + 3 * t2 * (1 - t) + full3, 1 - q * q * q});
  out.push_back({"X=3:N>=2", 3, 3 * t2 * (1 - t) + full3, p * p * (p + 3 * q)});
  out.push_back({"X=3:N>=3", 3, full3, p * p * p});
  out.push_back({"X=2:N>=1", 2, 2 * t * (1 - t) + full2, p * p + 2 * p * q});
  out.push_back({"X=2:N>=2", 2, full2, p * p});
  out.push_back({"X=1:N>=1", 1, full1, p});
  return out;
}

double branching_lower_bound(int d) {
  if (d < 1) throw std::invalid_argument("branching bound: d must be >= 1");
  return 1.0 / (2.0 * d - 1.0);
}

}  // namespace cdp
