#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cdp {

/// Parses "0.62", "17/10", "3" or "1e-3" into an exact rational.
mpq_class parse_rational(const std::string& text);
/// Exact value of a double (every finite double is a dyadic rational).
mpq_class exact_rational(double x);

/// Largest m for which binom_cdf uses exact rational arithmetic.
inline constexpr std::int64_t kExactBinomialLimit = 8000;
/// Guard applied to threshold comparisons on the floating path only.
inline constexpr double kFloatGuard = 1e-12;

/// B_{m,p}(k) = sum_{i<=k} C(m,i) p^i (1-p)^{m-i}, exactly.
mpq_class binom_cdf_exact(std::int64_t m, const mpq_class& p, std::int64_t k);
/// Regularized incomplete beta (Boost.Math); valid for any m.
double binom_cdf_float(std::int64_t m, double p, std::int64_t k);
/// Exact path for m <= kExactBinomialLimit, float path beyond. k >= 0 required.
double binom_cdf(std::int64_t m, double p, std::int64_t k);

/// P_lambda(k) = e^{-lambda} sum_{i<=k} lambda^i / i!, k >= 0, lambda >= 0.
double poisson_cdf(double lambda, std::int64_t k);

struct BoundParams {
  int d = 2;
  int kappa = 10;
  /// t = c/d when set; otherwise `t`.
  std::optional<mpq_class> c;
  mpq_class t = 0;
  int target_dim = 2;

  mpq_class time() const;
  void validate() const;
};

struct SBValue {
  mpq_class s, b;
  /// False when s came from the floating path (m beyond the exact limit).
  bool exact = true;
  double s_value() const { return s.get_d(); }
  double b_value() const { return b.get_d(); }
};

/// s = B_{2d-(2d'-1),t}(kappa-(2d'-1)), b = 1 - (1-t)^{floor(d/d')}/s.
SBValue s_b_of(const BoundParams& params);

struct ChenBounds {
  double s_lower = 0.0;
  double b_lower = 0.0;
};

/// s >= P_{2c}(kappa-3) - c(1-e^{-2c})/floor and
/// b >= 1 - e^{-(c/2)(1-1/floor)}/s_lower, valid for d > floor.
ChenBounds chen_lower_bounds(double c, int kappa, double floor = 4000.0);

struct Thresholds {
  mpq_class s, b;
  std::string label() const;
};

/// Generic pair and the two low-dimensional pairs.
Thresholds generic_thresholds();
std::vector<Thresholds> table_thresholds();

struct BoundEntry {
  int d = 0;
  int kappa = 0;
  double t = 0.0;
  double s = 0.0;
  double b = 0.0;
  std::string method;  // "direct" or "chen"
  std::string thresholds;
  bool pass = false;
};

struct BoundReport {
  std::string name;
  std::vector<BoundEntry> entries;
  bool all_pass() const;
  std::vector<const BoundEntry*> failures() const;
  nlohmann::json to_json(bool include_entries = true) const;
  void write_csv(std::ostream& out) const;
};

/// One low-dimensional case: dimension and the least admissible kappa.
struct TableCase {
  int d;
  int kappa_min;
};
std::vector<TableCase> theorem1_table();

struct Theorem1Options {
  int kappa = 10;
  int d_min = 0;  // 0: floor(kappa/2) + 1
  int d_max = 4000;
  mpq_class c = mpq_class(17, 10);
  double chen_floor = 4000.0;
  bool include_table = true;
  unsigned threads = 1;
};

/// Direct exact check for d <= chen_floor, Chen bounds beyond, plus the
/// table cases (every kappa from the least one up to 2d). Throws
/// std::invalid_argument when kappa < 10 or d_min <= kappa/2.
BoundReport verify_theorem1(const Theorem1Options& options);
BoundReport verify_theorem1_table(const mpq_class& c = mpq_class(17, 10));

struct InequalityMargin {
  std::string name;
  int inactive = 0;  // |X|
  mpq_class lhs, rhs;
  double margin() const { return mpq_class(lhs - rhs).get_d(); }
  bool holds() const { return lhs > rhs; }
};

/// The six planar comparison inequalities (|X| = 3, 3, 3, 2, 2, 1), exact.
std::vector<InequalityMargin> verify_theorem3_inequalities(const mpq_class& t, const mpq_class& p);

/// 1/(2d-1).
double branching_lower_bound(int d);

}  // namespace cdp
