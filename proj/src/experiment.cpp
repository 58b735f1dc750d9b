#include "cdp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cdp/bounds.hpp"
#include "cdp/dominance.hpp"
#include "cdp/dynamics.hpp"
#include "cdp/exploration.hpp"
#include "cdp/graph.hpp"
#include "cdp/mixed.hpp"
#include "cdp/parallel.hpp"
#include "cdp/stats.hpp"
#include "cdp/trace.hpp"

namespace cdp {

using nlohmann::json;

const std::vector<ActionSpec>& action_specs() {
  static const std::vector<ActionSpec> specs = {
      {"bounds", "verify-theorem1", "direct sweep over d, Chen extension and the low-dimensional table",
       {{"kappa", "10", "constraint kappa (>= 10)"},
        {"d_min", "0", "first dimension; 0 means floor(kappa/2)+1"},
        {"d_max", "4000", "last dimension"},
        {"c", "1.7", "rate c in t = c/d (decimal or p/q)"},
        {"chen_floor", "4000", "dimension beyond which the Chen bounds are used"},
        {"no_table", "", "skip the low-dimensional table cases", true}}},
      {"bounds", "table", "low-dimensional table cases only", {{"c", "1.7", "rate c in t = c/d"}}},
      {"bounds", "chen", "closed-form lower bounds for d beyond the floor",
       {{"c", "1.7", "rate c"}, {"kappa", "10", "constraint kappa"}, {"chen_floor", "4000", "floor parameter"}}},
      {"bounds", "poisson", "Poisson CDF", {{"lambda", "3.4", "mean"}, {"k", "7", "cutoff (>= 0)"}}},
      {"bounds", "binom", "binomial CDF",
       {{"m", "17", "trials"}, {"p", "0.17", "success probability (decimal or p/q)"}, {"k", "7", "cutoff (>= 0)"}}},
      {"bounds", "sb", "the (s, b) pair of the projected exploration",
       {{"d", "10", "dimension"},
        {"kappa", "10", "constraint"},
        {"c", "1.7", "rate c in t = c/d; ignored when t is set"},
        {"t", "", "explicit time"},
        {"dprime", "2", "target dimension d'"}}},
      {"bounds", "theorem3", "the six planar comparison inequalities",
       {{"t", "0.62", "time"}, {"p", "0.5", "comparison parameter"}}},
      {"bounds", "branching", "branching-process lower bound 1/(2d-1)", {{"d", "3", "dimension"}}},
      {"curve", "emit", "critical-curve bound on a b-grid (CSV)",
       {{"b_min", "0.5", "first b"},
        {"b_max", "1.0", "last b"},
        {"step", "0.005", "grid step"},
        {"constant", "0.6795", "hyperbola constant"}}},
      {"curve", "crossover", "b where the curve bound meets constant/b", {{"constant", "0.6795", "hyperbola constant"}}},
      {"curve", "ode", "RK4 integration of the curve ODE against the closed form",
       {{"b_end", "1.0", "end of integration"}, {"step", "1e-4", "RK4 step"}, {"tolerance", "1e-10", "local error cap"}}},
      {"curve", "classify", "supercriticality criteria met by (s, b)",
       {{"s", "0.9765", "site parameter"}, {"b", "0.5622", "bond parameter"}, {"constant", "0.6795", "hyperbola constant"}}},
      {"simulate", "theta", "crossing probability of the constrained model",
       {{"lattice", "hypercubic:2", "hypercubic:<d> or matching-square"},
        {"boundary", "torus", "torus or free-box"},
        {"kappa", "4", "constraint"},
        {"t", "0.5", "time"},
        {"t_grid", "", "comma-separated sorted times (overrides t)"},
        {"n", "20", "window radius"},
        {"samples", "1000", "Monte Carlo samples"},
        {"seed", "1", "master seed"}}},
      {"simulate", "mixed", "theta_n of mixed site-bond percolation",
       {{"s", "0.9765", "site parameter"},
        {"b", "0.5622", "bond parameter"},
        {"n", "10", "sphere radius n (target |x|_1 = n+1)"},
        {"samples", "10000", "Monte Carlo samples"},
        {"seed", "1", "master seed"},
        {"dprime", "2", "dimension of the lattice"}}},
      {"simulate", "pivotal", "pivotal sums against central finite differences",
       {{"s", "0.9", "site parameter"},
        {"b", "0.6", "bond parameter"},
        {"n", "6", "sphere radius"},
        {"samples", "20000", "samples for the pivotal sums"},
        {"seed", "1", "seed for the pivotal sums"},
        {"eps", "0.01", "finite-difference half width"},
        {"fd_samples", "400000", "samples per finite difference"},
        {"fd_seed", "2", "seed for the finite differences"}}},
      {"explore", "general", "projected exploration of Z^d",
       {{"d", "10", "dimension"},
        {"kappa", "10", "constraint"},
        {"t", "0.17", "time"},
        {"dprime", "2", "target dimension"},
        {"runs", "100", "independent runs"},
        {"seed", "1", "master seed"},
        {"max_open", "10000", "stop after this many open vertices"},
        {"radius", "200", "stop when an image reaches this sup-norm"},
        {"soundness", "", "replay every run against the dynamics", true},
        {"s_threshold", "0.9765", "dominance threshold for opening"},
        {"b_threshold", "0.5622", "dominance threshold for activation"},
        {"confidence", "0.99", "one-sided confidence level"}}},
      {"explore", "planar", "planar exploration with boundary and spoilt edges",
       {{"variant", "cubic", "cubic or matching-square"},
        {"kappa", "5", "constraint"},
        {"t", "0.62", "time"},
        {"runs", "100", "independent runs"},
        {"seed", "1", "master seed"},
        {"max_open", "10000", "stop after this many open vertices"},
        {"radius", "200", "stop when a vertex reaches this sup-norm"},
        {"soundness", "", "replay every run against the dynamics", true},
        {"window_radius", "0", "replay window radius; 0 means radius+1"},
        {"decoupling", "", "record traces and check them", true},
        {"p_threshold", "0.5", "Bernoulli parameter of the comparison"},
        {"confidence", "0.99", "one-sided confidence level"}}},
      {"oracle", "", "exact event probability on a small graph",
       {{"graph", "path2", "path2, path3, star3, cycle4, grid2x3, k4"},
        {"kappa", "1", "constraint"},
        {"t", "0.5", "time"},
        {"event", "edge:0", "edge:i, edges:i,j,.. or closed:i"}}},
      {"dominance", "", "one-sided verdicts for a tally CSV",
       {{"tally", "", "path to a context,trials,successes CSV"},
        {"kind", "general", "general or planar"},
        {"s", "0.9765", "threshold for 'open' (general)"},
        {"b", "0.5622", "threshold for 'activate' (general)"},
        {"p", "0.5", "Bernoulli parameter (planar)"},
        {"confidence", "0.99", "one-sided confidence level"}}},
      {"report", "", "re-execute an artifact and compare its results", {{"replay", "", "path to a JSON artifact"}}},
  };
  return specs;
}

const ActionSpec& find_action(const std::string& command, const std::string& action) {
  for (const auto& s : action_specs())
    if (s.command == command && s.action == action) return s;
  throw UsageError("unknown subcommand '" + command + (action.empty() ? "" : " " + action) + "'");
}

namespace {

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

std::string fmt(double x, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

/// Typed, recorded access to the request config.
class Params {
 public:
  Params(const ActionSpec& spec, const json& given) : spec_(spec) {
    for (const auto& [key, value] : given.items()) {
      const std::string k = normalize_key(key);
      if (!declared(k)) throw UsageError("unknown option '" + key + "' for " + spec.command + " " + spec.action);
      given_[k] = value;
    }
  }

  std::string str(const std::string& key) {
    const json v = raw(key);
    const std::string out = v.is_string() ? v.get<std::string>() : v.dump();
    resolved_[key] = out;
    return out;
  }

  double num(const std::string& key) {
    const json v = raw(key);
    double out = 0.0;
    if (v.is_number()) {
      out = v.get<double>();
    } else {
      const std::string text = v.get<std::string>();
      std::size_t pos = 0;
      try {
        out = std::stod(text, &pos);
      } catch (const std::exception&) {
        pos = std::string::npos;
      }
      if (pos != text.size()) throw UsageError("option '" + key + "' expects a number, got '" + text + "'");
    }
    if (!std::isfinite(out)) throw UsageError("option '" + key + "' must be finite");
    resolved_[key] = out;
    return out;
  }

  std::int64_t integer(const std::string& key) {
    const json v = raw(key);
    std::int64_t out = 0;
    if (v.is_number_integer()) {
      out = v.get<std::int64_t>();
    } else {
      const std::string text = v.is_string() ? v.get<std::string>() : v.dump();
      std::size_t pos = 0;
      try {
        out = std::stoll(text, &pos);
      } catch (const std::exception&) {
        pos = std::string::npos;
      }
      if (pos != text.size()) throw UsageError("option '" + key + "' expects an integer, got '" + text + "'");
    }
    resolved_[key] = out;
    return out;
  }

  int int32(const std::string& key, std::int64_t lo, std::int64_t hi = 1'000'000'000) {
    const std::int64_t v = integer(key);
    if (v < lo || v > hi)
      throw UsageError("option '" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
  }

  std::uint64_t count(const std::string& key, std::uint64_t lo = 1) {
    const std::int64_t v = integer(key);
    if (v < static_cast<std::int64_t>(lo)) throw UsageError("option '" + key + "' must be >= " + std::to_string(lo));
    return static_cast<std::uint64_t>(v);
  }

  std::uint64_t seed(const std::string& key) {
    const json v = raw(key);
    std::uint64_t out = 0;
    if (v.is_number_unsigned() || v.is_number_integer()) {
      out = v.get<std::uint64_t>();
    } else {
      const std::string text = v.get<std::string>();
      std::size_t pos = 0;
      try {
        out = std::stoull(text, &pos);
      } catch (const std::exception&) {
        pos = std::string::npos;
      }
      if (pos != text.size() || text.empty() || text[0] == '-')
        throw UsageError("option '" + key + "' expects an unsigned integer");
    }
    resolved_[key] = out;
    return out;
  }

  bool flag(const std::string& key) {
    const json v = raw(key);
    bool out = false;
    if (v.is_boolean()) {
      out = v.get<bool>();
    } else {
      std::string text = v.is_string() ? v.get<std::string>() : v.dump();
      std::transform(text.begin(), text.end(), text.begin(), ::tolower);
      if (text == "" || text == "false" || text == "0" || text == "off" || text == "no") out = false;
      else if (text == "true" || text == "1" || text == "on" || text == "yes") out = true;
      else throw UsageError("option '" + key + "' expects true or false");
    }
    resolved_[key] = out;
    return out;
  }

  mpq_class rational(const std::string& key) {
    const std::string text = str(key);
    try {
      return parse_rational(text);
    } catch (const std::invalid_argument& e) {
      throw UsageError("option '" + key + "': " + e.what());
    }
  }

  json resolved() const { return resolved_; }

 private:
  bool declared(const std::string& key) const {
    return std::any_of(spec_.options.begin(), spec_.options.end(), [&](const OptionSpec& o) { return o.name == key; });
  }
  json raw(const std::string& key) const {
    if (!declared(key)) throw std::logic_error("undeclared option " + key);
    if (const auto it = given_.find(key); it != given_.end()) return *it;
    for (const auto& o : spec_.options)
      if (o.name == key) return o.default_value;
    return "";
  }

  const ActionSpec& spec_;
  json given_ = json::object();
  json resolved_ = json::object();
};

/// Turns std::invalid_argument from the library into usage errors.
template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

json report_row(const BoundEntry& e) {
  return {{"d", e.d}, {"kappa", e.kappa}, {"s", e.s}, {"b", e.b}, {"pass", e.pass}, {"thresholds", e.thresholds}};
}

// ---------------------------------------------------------------------------

int run_bounds(const std::string& action, Params& p, json& result, Response& r, unsigned threads) {
  if (action == "verify-theorem1" || action == "table") {
    BoundReport report;
    if (action == "table") {
      const mpq_class c = p.rational("c");
      report = guarded([&] { return verify_theorem1_table(c); });
    } else {
      Theorem1Options o;
      o.kappa = p.int32("kappa", 1);
      o.d_min = p.int32("d_min", 0);
      o.d_max = p.int32("d_max", 2, 100'000'000);
      o.c = p.rational("c");
      o.chen_floor = static_cast<double>(p.int32("chen_floor", 1, 100'000'000));
      o.include_table = !p.flag("no_table");
      o.threads = threads;
      report = guarded([&] { return verify_theorem1(o); });
    }
    result = report.to_json(false);
    double min_s = 1.0, min_b = 1.0;
    bool any_direct = false;
    for (const auto& e : report.entries) {
      if (e.method != "direct" || e.thresholds == "none" || e.thresholds.find("0.9765") == std::string::npos) continue;
      any_direct = true;
      min_s = std::min(min_s, e.s);
      min_b = std::min(min_b, e.b);
    }
    if (any_direct) result["min_direct"] = {{"s", min_s}, {"b", min_b}};
    json table = json::array();
    for (const auto& e : report.entries)
      if (e.thresholds != "s>=0.9765,b>=0.5622") table.push_back(report_row(e));
    result["table_and_chen"] = table;
    std::ostringstream csv;
    report.write_csv(csv);
    r.artifacts.push_back({action == "table" ? "theorem1-table.csv" : "theorem1.csv", csv.str()});
    return report.all_pass() ? 0 : 1;
  }
  if (action == "chen") {
    const mpq_class c = p.rational("c");
    const int kappa = p.int32("kappa", 1);
    const double floor = static_cast<double>(p.int32("chen_floor", 1, 100'000'000));
    const ChenBounds chen = guarded([&] { return chen_lower_bounds(c.get_d(), kappa, floor); });
    const bool s_ok = chen.s_lower - 0.9765 > kFloatGuard, b_ok = chen.b_lower - 0.5622 > kFloatGuard;
    result = {{"s_lower", chen.s_lower}, {"b_lower", chen.b_lower}, {"s_pass", s_ok}, {"b_pass", b_ok},
              {"guard", kFloatGuard}};
    return s_ok && b_ok ? 0 : 1;
  }
  if (action == "poisson") {
    const double lambda = p.num("lambda");
    const std::int64_t k = p.integer("k");
    result = {{"value", guarded([&] { return poisson_cdf(lambda, k); })}};
    r.text = fmt(result["value"].get<double>(), "%.15g") + "\n";
    return 0;
  }
  if (action == "binom") {
    const std::int64_t m = p.integer("m");
    const mpq_class prob = p.rational("p");
    const std::int64_t k = p.integer("k");
    if (prob < 0 || prob > 1) throw UsageError("option 'p' must lie in [0,1]");
    const bool exact = m <= kExactBinomialLimit;
    const double value = guarded([&] {
      return exact ? binom_cdf_exact(m, prob, k).get_d() : binom_cdf_float(m, prob.get_d(), k);
    });
    result = {{"value", value}, {"method", exact ? "exact" : "float"}};
    r.text = fmt(value, "%.15g") + "\n";
    return 0;
  }
  if (action == "sb") {
    BoundParams bp;
    bp.d = p.int32("d", 2);
    bp.kappa = p.int32("kappa", 1);
    bp.target_dim = p.int32("dprime", 2);
    const std::string t = p.str("t");
    if (t.empty()) bp.c = p.rational("c");
    else bp.t = parse_rational(t);
    if (!t.empty()) p.str("c");
    const SBValue v = guarded([&] { return s_b_of(bp); });
    result = {{"t", bp.time().get_d()}, {"s", v.s_value()}, {"b", v.b_value()}, {"exact", v.exact}};
    return 0;
  }
  if (action == "theorem3") {
    const mpq_class t = p.rational("t"), prob = p.rational("p");
    const auto margins = guarded([&] { return verify_theorem3_inequalities(t, prob); });
    json rows = json::array();
    bool all = true;
    for (const auto& m : margins) {
      rows.push_back({{"name", m.name}, {"margin", m.margin()}, {"holds", m.holds()}});
      all = all && m.holds();
    }
    result = {{"inequalities", rows}, {"all_hold", all}};
    return all ? 0 : 1;
  }
  if (action == "branching") {
    const int d = p.int32("d", 1);
    result = {{"lower_bound", branching_lower_bound(d)}};
    return 0;
  }
  throw UsageError("unknown bounds action '" + action + "'");
}

int run_curve(const std::string& action, Params& p, json& result, Response& r) {
  if (action == "emit") {
    const double lo = p.num("b_min"), hi = p.num("b_max"), step = p.num("step"), constant = p.num("constant");
    const auto curve = guarded([&] { return emit_curve(lo, hi, step, constant); });
    std::ostringstream csv;
    write_curve_csv(csv, curve);
    r.artifacts.push_back({"curve.csv", csv.str()});
    r.text = csv.str();
    result = {{"points", curve.size()},
              {"first", {{"b", curve.front().b}, {"sc_upper", curve.front().sc_upper}}},
              {"last", {{"b", curve.back().b}, {"sc_upper", curve.back().sc_upper}}}};
    return 0;
  }
  if (action == "crossover") {
    const double constant = p.num("constant");
    const double b = guarded([&] { return crossover_solve(constant); });
    result = {{"b_star", b}, {"residual", std::abs(sc_upper(b) - constant / b)}};
    return 0;
  }
  if (action == "ode") {
    const double b_end = p.num("b_end"), step = p.num("step"), tol = p.num("tolerance");
    const OdeResult ode = guarded([&] { return ode_integrate(b_end, step, tol); });
    double max_diff = 0.0;
    for (const auto& [b, s] : ode.points) max_diff = std::max(max_diff, std::abs(s - sc_upper(b)));
    result = {{"s_end", ode.points.back().second},
              {"closed_form", sc_upper(b_end)},
              {"max_abs_difference", max_diff},
              {"max_local_error", ode.max_error_estimate},
              {"steps", ode.points.size() - 1}};
    return max_diff <= 1e-8 ? 0 : 1;
  }
  if (action == "classify") {
    MixedParams mp{p.num("s"), p.num("b")};
    const double constant = p.num("constant");
    result = {{"region", guarded([&] { return classify_region(mp, constant); })}};
    r.text = result["region"].get<std::string>() + "\n";
    return 0;
  }
  throw UsageError("unknown curve action '" + action + "'");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    try {
      out.push_back(std::stod(item, &pos));
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != item.size()) throw UsageError("t-grid entry '" + item + "' is not a number");
  }
  return out;
}

json theta_json(const ThetaEstimate& e) {
  return {{"spec", e.lattice}, {"kappa", e.kappa}, {"t", e.t},         {"n", e.n},
          {"samples", e.samples}, {"successes", e.successes}, {"estimate", e.estimate},
          {"stderr", e.std_error}, {"seed", e.seed}, {"boundary_mode", e.mode}};
}

int run_simulate(const std::string& action, Params& p, json& result, Response& r, unsigned threads) {
  if (action == "theta") {
    const std::string lattice = p.str("lattice"), boundary = p.str("boundary");
    const int kappa = p.int32("kappa", 1);
    const double t = p.num("t");
    const std::string grid = p.str("t_grid");
    const int n = p.int32("n", 1, 100000);
    const std::uint64_t samples = p.count("samples");
    const std::uint64_t seed = p.seed("seed");
    const auto estimates = guarded([&] {
      const LatticeSpec spec = LatticeSpec::parse(lattice, boundary, n);
      return theta_curve(spec, kappa, grid.empty() ? std::vector<double>{t} : parse_grid(grid), n, samples, seed,
                         threads);
    });
    std::string csv = csv_header_theta() + "\n";
    result["estimates"] = json::array();
    for (const auto& e : estimates) {
      csv += csv_row(e) + "\n";
      result["estimates"].push_back(theta_json(e));
    }
    r.artifacts.push_back({"theta.csv", csv});
    r.text = csv;
    return 0;
  }
  if (action == "mixed") {
    MixedParams mp{p.num("s"), p.num("b")};
    const int n = p.int32("n", 1, 10000);
    const std::uint64_t samples = p.count("samples");
    const std::uint64_t seed = p.seed("seed");
    const int dim = p.int32("dprime", 2, 8);
    const ThetaEstimate e = guarded([&] { return theta_n_mixed(mp, n, samples, seed, dim, threads); });
    result = theta_json(e);
    result["s"] = mp.s;
    result["b"] = mp.b;
    const std::string csv = csv_header_theta() + "\n" + csv_row(e) + "\n";
    r.artifacts.push_back({"theta-mixed.csv", csv});
    r.text = csv;
    return 0;
  }
  if (action == "pivotal") {
    MixedParams mp{p.num("s"), p.num("b")};
    const int n = p.int32("n", 1, 64);
    const std::uint64_t samples = p.count("samples");
    const std::uint64_t seed = p.seed("seed");
    const double eps = p.num("eps");
    const std::uint64_t fd_samples = p.count("fd_samples");
    const std::uint64_t fd_seed = p.seed("fd_seed");
    const PivotalEstimate piv = guarded([&] { return pivotality_estimate(mp, n, samples, seed, threads); });
    const FiniteDifference fs = guarded([&] { return finite_difference_site(mp, n, eps, fd_samples, fd_seed, threads); });
    const FiniteDifference fb = guarded([&] { return finite_difference_bond(mp, n, eps, fd_samples, fd_seed, threads); });
    const auto z = [](double a, double sa, double b, double sb) {
      const double se = std::hypot(sa, sb);
      return se > 0 ? (a - b) / se : (a == b ? 0.0 : INFINITY);
    };
    const double z_site = z(piv.site_sum, piv.site_std_error, fs.value, fs.std_error);
    const double z_bond = z(piv.bond_sum, piv.bond_std_error, fb.value, fb.std_error);
    const double factor = russo_ratio_factor(mp);
    const double ratio_excess = piv.site_sum - factor * piv.bond_sum;
    const double ratio_se = std::hypot(piv.site_std_error, factor * piv.bond_std_error);
    const bool site_ok = std::abs(z_site) <= 3, bond_ok = std::abs(z_bond) <= 3;
    const bool ratio_ok = ratio_excess <= 3 * ratio_se;
    result = {{"theta", piv.theta},
              {"site_pivotal", piv.site_sum},
              {"site_pivotal_stderr", piv.site_std_error},
              {"bond_pivotal", piv.bond_sum},
              {"bond_pivotal_stderr", piv.bond_std_error},
              {"fd_site", fs.value},
              {"fd_site_stderr", fs.std_error},
              {"fd_bond", fb.value},
              {"fd_bond_stderr", fb.std_error},
              {"z_site", z_site},
              {"z_bond", z_bond},
              {"ratio_factor", factor},
              {"ratio_excess", ratio_excess},
              {"ratio_stderr", ratio_se},
              {"site_match", site_ok},
              {"bond_match", bond_ok},
              {"ratio_holds", ratio_ok}};
    return site_ok && bond_ok && ratio_ok ? 0 : 1;
  }
  throw UsageError("unknown simulate action '" + action + "'");
}

json tally_json(const DominanceTally& tally) {
  json j = json::object();
  for (const auto& [name, c] : tally.contexts()) j[name] = {{"trials", c.trials}, {"successes", c.successes}};
  return j;
}

json dominance_json(const DominanceReport& report) {
  json rows = json::array();
  for (const auto& v : report.verdicts)
    rows.push_back({{"context", v.context},
                    {"trials", v.trials},
                    {"successes", v.successes},
                    {"frequency", v.frequency},
                    {"lower_bound", v.lower_bound},
                    {"threshold", v.threshold},
                    {"verdict", v.verdict()}});
  return {{"confidence", report.confidence}, {"all_pass", report.all_pass()}, {"verdicts", rows}};
}

struct ExploreAcc {
  std::uint64_t runs = 0, survived = 0, open = 0, checked_vertices = 0, checked_edges = 0, violations = 0;
  std::uint64_t decoupling_failures = 0;
  DominanceTally tally;
  std::vector<std::string> messages;
  void merge(const ExploreAcc& o) {
    runs += o.runs;
    survived += o.survived;
    open += o.open;
    checked_vertices += o.checked_vertices;
    checked_edges += o.checked_edges;
    violations += o.violations;
    decoupling_failures += o.decoupling_failures;
    tally.merge(o.tally);
    for (const auto& m : o.messages)
      if (messages.size() < 20) messages.push_back(m);
  }
  void note(std::uint64_t run, const std::string& msg) {
    if (messages.size() < 20) messages.push_back("run " + std::to_string(run) + ": " + msg);
  }
};

json explore_summary(const ExploreAcc& acc, double confidence) {
  return {{"runs", acc.runs},
          {"survived", acc.survived},
          {"survival_frequency", static_cast<double>(acc.survived) / static_cast<double>(acc.runs)},
          {"survival_lower_bound", stats::clopper_pearson_lower(acc.survived, acc.runs, confidence)},
          {"open_vertices", acc.open},
          {"tally", tally_json(acc.tally)}};
}

int run_explore(const std::string& action, Params& p, json& result, Response& r, unsigned threads) {
  if (action == "general") {
    const int d = p.int32("d", 2, 64);
    const int kappa = p.int32("kappa", 1, 2 * d);
    const double t = p.num("t");
    const int dprime = p.int32("dprime", 2, d);
    const std::uint64_t runs = p.count("runs");
    const std::uint64_t seed = p.seed("seed");
    StopCondition stop;
    stop.max_open = p.count("max_open");
    stop.radius = p.int32("radius", 1);
    const bool soundness = p.flag("soundness");
    const double s_th = p.num("s_threshold"), b_th = p.num("b_threshold"), conf = p.num("confidence");
    const ProjectionMap map = guarded([&] { return ProjectionMap::standard(d, dprime); });
    const ExploreAcc acc = guarded([&] {
      return parallel_accumulate<ExploreAcc>(runs, threads, [&](std::uint64_t i, ExploreAcc& a) {
        const ClockField clocks(derive_seed(seed, i));
        const GeneralExploration run = explore_general(d, kappa, t, map, clocks, stop);
        ++a.runs;
        a.survived += run.outcome == Outcome::survived;
        a.open += run.state.open;
        a.tally.merge(run.tally);
        if (soundness) {
          const SoundnessReport rep = verify_general_soundness(run, d, kappa, t, clocks);
          a.checked_vertices += rep.checked_vertices;
          a.checked_edges += rep.checked_edges;
          a.violations += rep.violations.size();
          for (const auto& v : rep.violations) a.note(i, v);
        }
      });
    });
    result = explore_summary(acc, conf);
    if (soundness)
      result["soundness"] = {{"checked_vertices", acc.checked_vertices},
                             {"checked_edges", acc.checked_edges},
                             {"violations", acc.violations},
                             {"messages", acc.messages}};
    if (acc.tally.get("open").trials > 0 && acc.tally.get("activate").trials > 0)
      result["dominance"] = dominance_json(dominance_report(acc.tally, general_thresholds(s_th, b_th), conf));
    std::ostringstream csv;
    acc.tally.write_csv(csv);
    r.artifacts.push_back({"tally-general.csv", csv.str()});
    return acc.violations == 0 ? 0 : 1;
  }
  if (action == "planar") {
    const PlanarVariant variant = guarded([&] { return parse_planar_variant(p.str("variant")); });
    const int kappa = p.int32("kappa", 1, PlanarGeometry{variant}.degree());
    const double t = p.num("t");
    const std::uint64_t runs = p.count("runs");
    const std::uint64_t seed = p.seed("seed");
    StopCondition stop;
    stop.max_open = p.count("max_open");
    stop.radius = p.int32("radius", 1);
    const bool soundness = p.flag("soundness");
    int window = p.int32("window_radius", 0);
    if (window == 0) window = stop.radius + 1;
    const bool decoupling = p.flag("decoupling");
    const double p_th = p.num("p_threshold"), conf = p.num("confidence");
    std::string first_trace;
    const ExploreAcc acc = guarded([&] {
      return parallel_accumulate<ExploreAcc>(runs, threads, [&](std::uint64_t i, ExploreAcc& a) {
        const ClockField clocks(derive_seed(seed, i));
        const PlanarExploration run = explore_planar(variant, kappa, t, clocks, stop, decoupling);
        ++a.runs;
        a.survived += run.outcome == Outcome::survived;
        a.open += run.state.open;
        a.tally.merge(run.tally);
        if (soundness) {
          const SoundnessReport rep = verify_planar_soundness(run, kappa, t, clocks, window);
          a.checked_vertices += rep.checked_vertices;
          a.checked_edges += rep.checked_edges;
          a.violations += rep.violations.size();
          for (const auto& v : rep.violations) a.note(i, v);
        }
        if (decoupling) {
          const DecouplingReport rep = check_decoupling(*run.trace);
          if (!rep.ok) {
            ++a.decoupling_failures;
            a.note(i, rep.violations.front());
          }
          if (i == 0) first_trace = format_trace(*run.trace);
        }
      });
    });
    result = explore_summary(acc, conf);
    if (soundness)
      result["soundness"] = {{"window_radius", window},
                             {"checked_vertices", acc.checked_vertices},
                             {"checked_edges", acc.checked_edges},
                             {"violations", acc.violations}};
    if (decoupling) result["decoupling"] = {{"failed_runs", acc.decoupling_failures}};
    result["messages"] = acc.messages;
    std::map<std::string, double> thresholds;
    for (const auto& [ctx, th] : planar_thresholds(p_th))
      if (acc.tally.get(ctx).trials > 0) thresholds[ctx] = th;
    if (!thresholds.empty()) result["dominance"] = dominance_json(dominance_report(acc.tally, thresholds, conf));
    std::ostringstream csv;
    acc.tally.write_csv(csv);
    r.artifacts.push_back({"tally-planar.csv", csv.str()});
    if (!first_trace.empty()) r.artifacts.push_back({"trace-run0.txt", first_trace});
    return acc.violations == 0 && acc.decoupling_failures == 0 ? 0 : 1;
  }
  throw UsageError("unknown explore action '" + action + "'");
}

int run_oracle(Params& p, json& result, Response& r) {
  const std::string graph = p.str("graph");
  const int kappa = p.int32("kappa", 1);
  const double t = p.num("t");
  const std::string event = p.str("event");
  const double value = guarded([&] {
    const Graph g = named_graph(graph);
    return exact_event_probability(g, kappa, t, parse_event(event, g));
  });
  result = {{"probability", value}};
  r.text = fmt(value, "%.15g") + "\n";
  return 0;
}

int run_dominance(Params& p, json& result) {
  const std::string path = p.str("tally");
  const std::string kind = p.str("kind");
  const double s = p.num("s"), b = p.num("b"), prob = p.num("p"), conf = p.num("confidence");
  if (path.empty()) throw UsageError("dominance needs --tally <csv>");
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read tally file '" + path + "'");
  const DominanceTally tally = guarded([&] { return DominanceTally::read_csv(in); });
  std::map<std::string, double> thresholds;
  if (kind == "general") {
    thresholds = general_thresholds(s, b);
  } else if (kind == "planar") {
    for (const auto& [ctx, th] : planar_thresholds(prob))
      if (tally.get(ctx).trials > 0) thresholds[ctx] = th;
  } else {
    throw UsageError("kind must be 'general' or 'planar'");
  }
  result = dominance_json(guarded([&] { return dominance_report(tally, thresholds, conf); }));
  return 0;
}

void diff_json(const json& a, const json& b, const std::string& path, std::vector<std::string>& out) {
  if (a.is_object() && b.is_object()) {
    std::set<std::string> keys;
    for (const auto& [k, v] : a.items()) keys.insert(k);
    for (const auto& [k, v] : b.items()) keys.insert(k);
    for (const auto& k : keys) {
      if (!a.contains(k) || !b.contains(k)) out.push_back(path + "/" + k);
      else diff_json(a[k], b[k], path + "/" + k, out);
    }
    return;
  }
  if (a.is_array() && b.is_array() && a.size() == b.size()) {
    for (std::size_t i = 0; i < a.size(); ++i) diff_json(a[i], b[i], path + "/" + std::to_string(i), out);
    return;
  }
  if (a != b) out.push_back(path.empty() ? "/" : path);
}

int run_report(Params& p, json& result, unsigned threads) {
  const std::string path = p.str("replay");
  if (path.empty()) throw UsageError("report needs --replay <artifact.json>");
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read artifact '" + path + "'");
  json artifact;
  try {
    artifact = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("artifact '" + path + "' is not valid JSON: " + e.what());
  }
  for (const char* key : {"format", "command", "action", "config", "result"})
    if (!artifact.contains(key)) throw UsageError("artifact lacks '" + std::string(key) + "'");
  if (artifact["format"] != kFormatVersion) throw UsageError("unsupported artifact format");
  if (artifact["command"] == "report") throw UsageError("cannot replay a replay report");
  Request again;
  again.command = artifact["command"];
  again.action = artifact["action"];
  again.config = artifact["config"];
  again.threads = threads;
  const Response fresh = execute(again);
  std::vector<std::string> differences;
  diff_json(artifact["result"], fresh.record["result"], "", differences);
  result = {{"artifact", path},
            {"command", again.command},
            {"action", again.action},
            {"match", differences.empty()},
            {"differences", differences}};
  return differences.empty() ? 0 : 1;
}

}  // namespace

Response execute(const Request& request) {
  const ActionSpec& spec = find_action(request.command, request.action);
  Params p(spec, request.config);
  Response r;
  json result;
  const unsigned threads = std::max(1u, request.threads);
  int code = 0;
  if (spec.command == "bounds") code = run_bounds(spec.action, p, result, r, threads);
  else if (spec.command == "curve") code = run_curve(spec.action, p, result, r);
  else if (spec.command == "simulate") code = run_simulate(spec.action, p, result, r, threads);
  else if (spec.command == "explore") code = run_explore(spec.action, p, result, r, threads);
  else if (spec.command == "oracle") code = run_oracle(p, result, r);
  else if (spec.command == "dominance") code = run_dominance(p, result);
  else if (spec.command == "report") code = run_report(p, result, threads);
  r.exit_code = code;
  r.record = {{"format", kFormatVersion},
              {"command", spec.command},
              {"action", spec.action},
              {"config", p.resolved()},
              {"result", result}};
  return r;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  json out = json::object();
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(row) + ": expected key=value");
    const auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    if (key.empty()) throw UsageError(path + ":" + std::to_string(row) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace cdp
