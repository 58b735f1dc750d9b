// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "cdp/bounds.hpp"
#include "cdp/dominance.hpp"
#include "cdp/dynamics.hpp"
#include "cdp/experiment.hpp"
#include "cdp/exploration.hpp"
#include "cdp/graph.hpp"
#include "cdp/mixed.hpp"
#include "cdp/parallel.hpp"
#include "cdp/stats.hpp"

using namespace cdp;

namespace {

const unsigned kThreads = std::max(1u, std::thread::hardware_concurrency());

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Verdict direct_sweep() {
  const auto start = std::chrono::steady_clock::now();
  Theorem1Options o;
  o.kappa = 10;
  o.d_max = 4000;
  o.threads = kThreads;
  const BoundReport r = verify_theorem1(o);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // Every entry must clear the thresholds it is reported against strictly.
  const Thresholds g = generic_thresholds();
  std::vector<Thresholds> all = table_thresholds();
  all.push_back(g);
  bool strict = true;
  int direct = 0, table = 0;
  for (const auto& e : r.entries) {
    if (e.method != "direct") continue;
    (e.thresholds == g.label() ? direct : table) += 1;
    const auto it = std::find_if(all.begin(), all.end(), [&](const Thresholds& t) { return t.label() == e.thresholds; });
    strict = strict && it != all.end() && exact_rational(e.s) > it->s && exact_rational(e.b) > it->b;
  }
  const bool ok = r.all_pass() && strict && direct == 3995 && table > 0 && secs <= 60.0;
  return {ok, fmt("%.0f dimensions 6..4000 and %.0f table cases pass, %.1f s", direct, table, secs)};
}

Verdict chen_extension() {
  const ChenBounds c = chen_lower_bounds(1.7, 10, 4000);
  const bool ok = c.s_lower - 0.9765 > kFloatGuard && c.b_lower - 0.5622 > kFloatGuard;
  return {ok, fmt("s_lower = %.6f > 0.9765, b_lower = %.6f > 0.5622", c.s_lower, c.b_lower)};
}

Verdict poisson_limit() {
  const double s = poisson_cdf(3.4, 7);
  const double b = 1 - std::exp(-0.85) / s;
  const bool ok = std::abs(s - 0.9770) <= 1e-4 && std::abs(b - 0.5625) <= 1e-4;
  return {ok, fmt("P_3.4(7) = %.6f, 1 - e^-0.85/P = %.6f", s, b)};
}

Verdict critical_curve() {
  const OdeResult ode = ode_integrate(1.0);
  double worst = 0.0;
  for (const auto& [b, s] : ode.points) worst = std::max(worst, std::abs(s - sc_upper(b)));
  const bool gates = sc_upper(0.5622) < 0.9765 && sc_upper(0.5596) < 0.9809 && sc_upper(0.5806) < 0.9708;
  const bool ok = sc_upper(0.5) == 1.0 && worst <= 1e-8 && gates;
  return {ok, fmt("ODE max deviation %.2e; sc_upper(0.5622) = %.5f, (0.5596) = %.5f, (0.5806) = %.5f", worst,
                  sc_upper(0.5622), sc_upper(0.5596), sc_upper(0.5806))};
}

Verdict crossover() {
  const double b = crossover_solve(kWiermanConstant);
  return {b >= 0.73 && b <= 0.75, fmt("b* = %.6f", b)};
}

Verdict planar_inequalities() {
  const auto at_half = verify_theorem3_inequalities(mpq_class(31, 50), mpq_class(1, 2));
  bool all = at_half.size() == 6;
  double least = 1.0;
  for (const auto& m : at_half) {
    all = all && m.holds();
    least = std::min(least, m.margin());
  }
  const auto at_53 = verify_theorem3_inequalities(mpq_class(31, 50), mpq_class(53, 100));
  const bool control = at_53.back().inactive == 1 && !at_53.back().holds();
  return {all && control, fmt("six hold at p = 0.5 (least margin %.2e); |X|=1 fails at p = 0.53 (margin %.2e)", least,
                              at_53.back().margin())};
}

Verdict oracle_equivalence() {
  struct Case {
    std::string graph;
    int kappa;
    double t;
    std::string event;
  };
  std::vector<Case> cases = {
      {"path2", 1, 0.5, "edge:0"},   {"path2", 1, 0.9, "edge:1"},      {"path3", 1, 0.8, "edge:1"},
      {"path3", 1, 1.0, "edges:0,2"}, {"star3", 2, 1.0, "edge:0"},      {"star3", 1, 0.6, "closed:2"},
      {"cycle4", 1, 0.7, "edges:0,2"}, {"cycle4", 2, 0.9, "edge:3"},    {"grid2x3", 2, 0.8, "edge:5"},
      {"grid2x3", 1, 0.6, "closed:4"}, {"k4", 2, 0.75, "edges:0,5"},    {"k4", 1, 1.0, "edge:2"},
  };
  // Plus the full grid of graphs, kappa in 1..4 and four times, on the first edge.
  for (const auto& name : named_graph_names())
    for (int kappa = 1; kappa <= 4; ++kappa)
      for (double t : {0.25, 0.5, 0.75, 1.0}) cases.push_back({name, kappa, t, "edge:0"});
  constexpr std::uint64_t kSamples = 1'000'000;
  double worst_z = 0.0;
  bool ok = true;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const Graph g = named_graph(cases[c].graph);
    ok = ok && g.num_edges() <= 8;
    const ConfigurationEvent event = parse_event(cases[c].event, g);
    const double p = exact_event_probability(g, cases[c].kappa, cases[c].t, event);
    struct Hits {
      std::uint64_t n = 0;
      void merge(const Hits& o) { n += o.n; }
    };
    const Hits hits = parallel_accumulate<Hits>(kSamples, kThreads, [&](std::uint64_t i, Hits& h) {
      h.n += event(evolve(g, cases[c].kappa, ClockField(derive_seed(1000 + c, i)), cases[c].t).open);
    });
    const double freq = static_cast<double>(hits.n) / kSamples;
    const double se = std::sqrt(std::max(p * (1 - p), 1e-300) / kSamples);
    const double z = std::abs(freq - p) / se;
    worst_z = std::max(worst_z, z);
    ok = ok && z <= 4.0;
  }
  double closed_form_err = 0.0;
  const Graph path2 = named_graph("path2");
  for (double t : {0.1, 0.3, 0.5, 0.77, 1.0})
    closed_form_err = std::max(
        closed_form_err, std::abs(exact_event_probability(path2, 1, t, parse_event("edge:0", path2)) - (t - t * t / 2)));
  const Graph star3 = named_graph("star3");
  const double star = exact_event_probability(star3, 2, 1.0, parse_event("edge:0", star3));
  ok = ok && closed_form_err <= 1e-12 && std::abs(star - 2.0 / 3) <= 1e-12;
  return {ok, fmt("%.0f cases at 1e6 samples, worst |z| = %.2f; path-2 error %.1e; star-3 = %.12f",
                  static_cast<double>(cases.size()), worst_z, closed_form_err, star)};
}

Verdict bernoulli_reduction() {
  // Exact: with kappa at least the maximum degree every edge is open with
  // probability t, jointly independent.
  double exact_err = 0.0;
  for (const auto& name : named_graph_names()) {
    const Graph g = named_graph(name);
    const int kappa = g.max_degree();
    for (double t : {0.2, 0.5, 0.9}) {
      for (int e = 0; e < g.num_edges(); ++e)
        exact_err = std::max(
            exact_err, std::abs(exact_event_probability(g, kappa, t, parse_event("edge:" + std::to_string(e), g)) - t));
      exact_err =
          std::max(exact_err, std::abs(exact_event_probability(g, kappa, t, parse_event("edges:0,1", g)) - t * t));
    }
  }
  // Simulation on a torus window of Z^2 with kappa = 4.
  const LatticeWindow w = build_window(LatticeSpec::hypercubic(2, Boundary::torus, 5));
  const double t = 0.4;
  constexpr std::uint64_t kSamples = 20000;
  struct Acc {
    std::uint64_t open = 0;
    std::vector<std::uint64_t> degree = std::vector<std::uint64_t>(5, 0);
    void merge(const Acc& o) {
      open += o.open;
      for (int k = 0; k < 5; ++k) degree[k] += o.degree[k];
    }
  };
  const Acc acc = parallel_accumulate<Acc>(kSamples, kThreads, [&](std::uint64_t i, Acc& a) {
    const Configuration c = evolve(w.graph, 4, ClockField(derive_seed(77, i)), t);
    a.open += c.open_count();
    ++a.degree[c.degree[w.origin]];
  });
  const double n = static_cast<double>(kSamples) * w.graph.num_edges();
  // Edges of one sample are independent, so the count is Binomial(n, t).
  const double z = std::abs(static_cast<double>(acc.open) / n - t) / std::sqrt(t * (1 - t) / n);
  std::vector<double> expected(5);
  for (int k = 0; k <= 4; ++k)
    expected[k] = std::tgamma(5.0) / (std::tgamma(k + 1.0) * std::tgamma(5.0 - k)) * std::pow(t, k) * std::pow(1 - t, 4 - k);
  const double chi2 = stats::chi_square_statistic(acc.degree, expected);
  const double crit = stats::chi_square_quantile(4, 0.999);
  const bool ok = exact_err <= 1e-12 && z <= 4.0 && chi2 < crit;
  return {ok, fmt("exact deviation %.1e; edge frequency |z| = %.2f; origin degree chi2 = %.2f < %.2f", exact_err, z, chi2,
                  crit)};
}

struct SoundAcc {
  std::uint64_t runs = 0, vertices = 0, violations = 0;
  void merge(const SoundAcc& o) {
    runs += o.runs;
    vertices += o.vertices;
    violations += o.violations;
  }
};

Verdict exploration_soundness() {
  const auto map = ProjectionMap::standard(10, 2);
  const SoundAcc general = parallel_accumulate<SoundAcc>(100, kThreads, [&](std::uint64_t i, SoundAcc& a) {
    const ClockField clocks(derive_seed(2024, i));
    const auto run = explore_general(10, 10, 0.17, map, clocks);
    const auto rep = verify_general_soundness(run, 10, 10, 0.17, clocks);
    ++a.runs;
    a.vertices += rep.checked_vertices;
    a.violations += rep.violations.size();
  });
  StopCondition stop;
  stop.radius = 11;
  const SoundAcc planar = parallel_accumulate<SoundAcc>(100, kThreads, [&](std::uint64_t i, SoundAcc& a) {
    const ClockField clocks(derive_seed(2025, i));
    const auto run = explore_planar(PlanarVariant::cubic, 5, 0.62, clocks, stop);
    const auto rep = verify_planar_soundness(run, 5, 0.62, clocks, 12);
    ++a.runs;
    a.vertices += rep.checked_vertices;
    a.violations += rep.violations.size();
  });
  const bool ok = general.runs == 100 && planar.runs == 100 && general.violations == 0 && planar.violations == 0;
  return {ok, fmt("general: %.0f open vertices replayed, %.0f violations; planar: %.0f replayed, %.0f violations",
                  static_cast<double>(general.vertices), static_cast<double>(general.violations),
                  static_cast<double>(planar.vertices), static_cast<double>(planar.violations))};
}

struct TallyAcc {
  DominanceTally tally;
  std::uint64_t survived = 0;
  void merge(const TallyAcc& o) {
    tally.merge(o.tally);
    survived += o.survived;
  }
};

Verdict dominance_tallies() {
  const auto map = ProjectionMap::standard(10, 2);
  const TallyAcc general = parallel_accumulate<TallyAcc>(100, kThreads, [&](std::uint64_t i, TallyAcc& a) {
    a.tally.merge(explore_general(10, 10, 0.17, map, ClockField(derive_seed(31, i))).tally);
  });
  const TallyAcc planar = parallel_accumulate<TallyAcc>(100, kThreads, [&](std::uint64_t i, TallyAcc& a) {
    a.tally.merge(explore_planar(PlanarVariant::cubic, 5, 0.62, ClockField(derive_seed(32, i))).tally);
  });
  const DominanceReport g = dominance_report(general.tally, general_thresholds(0.9765, 0.5622), 0.99);
  const DominanceReport p = dominance_report(planar.tally, planar_thresholds(0.5), 0.99);
  bool enough = true;
  for (const auto& v : g.verdicts) enough = enough && v.trials >= 100000;
  for (const auto& v : p.verdicts) enough = enough && v.trials >= 100000;

  // Finite-window survival: the exploration reaches sup-norm radius n.
  constexpr std::uint64_t kRuns = 200;
  double worst_lower = 1.0;
  for (int n : {10, 20, 40}) {
    StopCondition stop;
    stop.radius = n;
    stop.max_open = 100'000'000;
    const TallyAcc gs = parallel_accumulate<TallyAcc>(kRuns, kThreads, [&](std::uint64_t i, TallyAcc& a) {
      a.survived += explore_general(10, 10, 0.17, map, ClockField(derive_seed(40 + n, i)), stop).outcome ==
                    Outcome::survived;
    });
    const TallyAcc ps = parallel_accumulate<TallyAcc>(kRuns, kThreads, [&](std::uint64_t i, TallyAcc& a) {
      a.survived += explore_planar(PlanarVariant::cubic, 5, 0.62, ClockField(derive_seed(80 + n, i)), stop).outcome ==
                    Outcome::survived;
    });
    worst_lower = std::min({worst_lower, stats::clopper_pearson_lower(gs.survived, kRuns, 0.99),
                            stats::clopper_pearson_lower(ps.survived, kRuns, 0.99)});
  }
  // The mixed model at the dominating parameters percolates as well.
  double mixed_lower = 1.0;
  for (int n : {10, 20, 40}) {
    const ThetaEstimate m = theta_n_mixed({0.9765, 0.5622}, n, 2000, 50 + n);
    mixed_lower = std::min(mixed_lower, stats::clopper_pearson_lower(m.successes, m.samples, 0.99));
  }
  double g_margin = 1.0, p_margin = 1.0;
  for (const auto& v : g.verdicts) g_margin = std::min(g_margin, v.lower_bound - v.threshold);
  for (const auto& v : p.verdicts) p_margin = std::min(p_margin, v.lower_bound - v.threshold);
  const bool ok = enough && g.all_pass() && p.all_pass() && worst_lower > 0.05 && mixed_lower > 0.05;
  return {ok, fmt("least lower-bound margin: general %.4f, planar %.4f; least survival lower bound %.3f, mixed %.3f "
                  "(n = 10, 20, 40)",
                  g_margin, p_margin, worst_lower, mixed_lower)};
}

Verdict pivotal_derivatives() {
  Request r;
  r.command = "simulate";
  r.action = "pivotal";
  r.config = {{"s", "0.9"}, {"b", "0.6"}, {"n", "6"}};
  r.threads = kThreads;
  const Response out = execute(r);
  const auto& res = out.record["result"];
  const bool ok = out.exit_code == 0 && res["site_match"] == true && res["bond_match"] == true &&
                  res["ratio_holds"] == true;
  return {ok, fmt("z_site = %.2f, z_bond = %.2f, ratio excess %.3f (se %.3f)", res["z_site"].get<double>(),
                  res["z_bond"].get<double>(), res["ratio_excess"].get<double>(), res["ratio_stderr"].get<double>())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"direct-sweep", direct_sweep},
      {"chen-extension", chen_extension},
      {"poisson-limit", poisson_limit},
      {"critical-curve", critical_curve},
      {"crossover", crossover},
      {"planar-inequalities", planar_inequalities},
      {"oracle-equivalence", oracle_equivalence},
      {"bernoulli-reduction", bernoulli_reduction},
      {"exploration-soundness", exploration_soundness},
      {"dominance-tallies", dominance_tallies},
      {"pivotal-derivatives", pivotal_derivatives},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
