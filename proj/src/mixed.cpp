#include "cdp/mixed.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "cdp/parallel.hpp"

namespace cdp {

void MixedParams::validate() const {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("mixed params: s must lie in [0,1]");
  if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("mixed params: b must lie in [0,1]");
}

double sc_upper(double b) {
  if (!(b >= 0.5 && b <= 1.0)) throw std::invalid_argument("sc_upper: b must lie in [1/2, 1]");
  if (b == 0.5) return 1.0;
  return std::exp(-(2.0 / 3.0) * (b - 0.5 + std::log((8.0 - 6.0 * b) / 5.0) / 3.0));
}

namespace {

double slope(double b, double s) { return -2.0 * s * (1.0 - b) / (4.0 - 3.0 * b); }

double rk4_step(double b, double s, double h) {
  const double k1 = slope(b, s);
  const double k2 = slope(b + h / 2, s + h / 2 * k1);
  const double k3 = slope(b + h / 2, s + h / 2 * k2);
  const double k4 = slope(b + h, s + h * k3);
  return s + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

}  // namespace

OdeResult ode_integrate(double b_end, double step, double tolerance) {
  if (!(b_end >= 0.5 && b_end <= 1.0)) throw std::invalid_argument("ode: b_end must lie in [1/2, 1]");
  if (!(step > 0.0)) throw std::invalid_argument("ode: step must be positive");
  OdeResult out;
  out.points.emplace_back(0.5, 1.0);
  if (b_end == 0.5) return out;
  const auto n = static_cast<std::int64_t>(std::ceil((b_end - 0.5) / step - 1e-9));
  const double h = (b_end - 0.5) / static_cast<double>(n);
  out.step = h;
  double s = 1.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double b = 0.5 + h * static_cast<double>(i);
    const double full = rk4_step(b, s, h);
    const double half = rk4_step(b + h / 2, rk4_step(b, s, h / 2), h / 2);
    const double err = std::abs(full - half);
    out.max_error_estimate = std::max(out.max_error_estimate, err);
    if (err > tolerance)
      throw std::runtime_error("ode: local error estimate " + std::to_string(err) + " above tolerance at b = " +
                               std::to_string(b));
    s = half;
    out.points.emplace_back(i + 1 == n ? b_end : 0.5 + h * static_cast<double>(i + 1), s);
  }
  return out;
}

std::string classify_region(const MixedParams& params, double constant) {
  params.validate();
  const bool corollary = params.b >= 0.5 && params.s > sc_upper(params.b);
  const bool hammersley = params.s * params.b >= constant;
  if (corollary && hammersley) return "both";
  if (corollary) return "corollary-supercritical";
  if (hammersley) return "hammersley-supercritical";
  return "unknown";
}

std::vector<CurvePoint> emit_curve(double b_min, double b_max, double step, double constant) {
  if (!(b_min >= 0.5 && b_max <= 1.0 && b_min <= b_max)) throw std::invalid_argument("curve: need 1/2 <= b-min <= b-max <= 1");
  if (!(step > 0.0)) throw std::invalid_argument("curve: step must be positive");
  const auto n = static_cast<std::int64_t>(std::floor((b_max - b_min) / step + 1e-9));
  std::vector<CurvePoint> out;
  for (std::int64_t i = 0; i <= n; ++i) {
    CurvePoint p;
    p.b = std::min(b_max, b_min + step * static_cast<double>(i));
    p.sc_upper = sc_upper(p.b);
    p.hammersley_s = constant / p.b;
    p.region = p.sc_upper < p.hammersley_s   ? "corollary-supercritical"
               : p.sc_upper > p.hammersley_s ? "hammersley-supercritical"
                                             : "both";
    out.push_back(p);
  }
  return out;
}

std::string csv_header_curve() { return "b,sc_upper,hammersley_s,region"; }

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << csv_header_curve() << '\n';
  char buf[128];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g,", p.b, p.sc_upper, p.hammersley_s);
    out << buf << p.region << '\n';
  }
}

double crossover_solve(double constant, double tolerance) {
  if (!(constant > 0.0)) throw std::invalid_argument("crossover: constant must be positive");
  const auto f = [&](double b) { return sc_upper(b) - constant / b; };
  double lo = 0.5, hi = 1.0;
  if (f(lo) * f(hi) > 0) throw std::invalid_argument("crossover: no sign change on (1/2, 1) for this constant");
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0) == (f(lo) < 0)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

MixedBall build_mixed_ball(int n, int dim) {
  if (n < 1) throw std::invalid_argument("mixed ball: n must be >= 1");
  if (dim < 2) throw std::invalid_argument("mixed ball: dimension must be >= 2");
  MixedBall ball;
  ball.n = n;
  ball.dim = dim;
  const int radius = n + 1;
  std::unordered_map<Vertex, int, VertexHash> index;
  Vertex v(dim, 0);
  std::function<void(int, int)> gen = [&](int c, int budget) {
    if (c == dim) {
      index.emplace(v, static_cast<int>(ball.vertices.size()));
      ball.vertices.push_back(v);
      return;
    }
    for (int x = -budget; x <= budget; ++x) {
      v[c] = x;
      gen(c + 1, budget - std::abs(x));
    }
    v[c] = 0;
  };
  gen(0, radius);
  ball.adjacency.resize(ball.vertices.size());
  for (std::size_t i = 0; i < ball.vertices.size(); ++i) {
    const Vertex& x = ball.vertices[i];
    int norm = 0;
    for (int c : x) norm += std::abs(c);
    ball.target.push_back(norm == radius);
    ball.site_counters.push_back(site_counter(x));
    for (int c = 0; c < dim; ++c) {
      Vertex y = x;
      ++y[c];
      const auto it = index.find(y);
      if (it == index.end()) continue;
      const int e = static_cast<int>(ball.edges.size());
      ball.edges.push_back({static_cast<int>(i), it->second});
      ball.bond_counters.push_back(edge_counter(LatticeKind::hypercubic, EdgeId{x, c}));
      ball.adjacency[i].emplace_back(it->second, e);
      ball.adjacency[it->second].emplace_back(static_cast<int>(i), e);
    }
  }
  ball.origin = index.at(Vertex(dim, 0));
  return ball;
}

MixedSample draw_mixed_sample(const MixedBall& ball, std::uint64_t seed, std::uint64_t index) {
  const UniformField sites(derive_seed(seed, index, 1)), bonds(derive_seed(seed, index, 2));
  MixedSample out;
  out.site_u.reserve(ball.vertices.size());
  out.bond_u.reserve(ball.edges.size());
  for (const auto& c : ball.site_counters) out.site_u.push_back(sites(c));
  for (const auto& c : ball.bond_counters) out.bond_u.push_back(bonds(c));
  return out;
}

namespace {

/// BFS; `expanded` marks the origin and every reached open interior site.
bool explore_ball(const MixedBall& ball, const std::vector<std::uint8_t>& site_open,
                  const std::vector<std::uint8_t>& bond_open, std::vector<std::uint8_t>* expanded,
                  std::vector<std::uint8_t>* reached) {
  std::vector<std::uint8_t> seen(ball.vertices.size(), 0);
  std::vector<int> queue{ball.origin};
  seen[ball.origin] = 1;
  bool hit = false;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const int x = queue[h];
    if (expanded) (*expanded)[x] = 1;
    for (const auto& [y, e] : ball.adjacency[x]) {
      if (!bond_open[e] || seen[y]) continue;
      seen[y] = 1;
      if (reached) (*reached)[y] = 1;
      if (ball.target[y]) {
        hit = true;
        if (!expanded) return true;
        continue;
      }
      if (site_open[y]) queue.push_back(y);
    }
  }
  return hit;
}

void open_states(const MixedSample& sample, const MixedParams& p, std::vector<std::uint8_t>& site,
                 std::vector<std::uint8_t>& bond) {
  site.resize(sample.site_u.size());
  bond.resize(sample.bond_u.size());
  for (std::size_t i = 0; i < site.size(); ++i) site[i] = sample.site_u[i] < p.s;
  for (std::size_t i = 0; i < bond.size(); ++i) bond[i] = sample.bond_u[i] < p.b;
}

struct MixedCounts {
  std::uint64_t samples = 0, successes = 0;
  std::uint64_t site_sum = 0, site_sq = 0, bond_sum = 0, bond_sq = 0;
  void merge(const MixedCounts& o) {
    samples += o.samples;
    successes += o.successes;
    site_sum += o.site_sum;
    site_sq += o.site_sq;
    bond_sum += o.bond_sum;
    bond_sq += o.bond_sq;
  }
};

std::pair<double, double> mean_and_error(std::uint64_t sum, std::uint64_t sq, std::uint64_t n) {
  const double mean = static_cast<double>(sum) / static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  const double var = (static_cast<double>(sq) - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
  return {mean, std::sqrt(std::max(0.0, var) / static_cast<double>(n))};
}

}  // namespace

bool mixed_connects(const MixedBall& ball, const std::vector<std::uint8_t>& site_open,
                    const std::vector<std::uint8_t>& bond_open) {
  return explore_ball(ball, site_open, bond_open, nullptr, nullptr);
}

ThetaEstimate theta_n_mixed(const MixedParams& params, int n, std::uint64_t samples, std::uint64_t seed, int dim,
                            unsigned threads) {
  params.validate();
  if (samples < 1) throw std::invalid_argument("theta_n_mixed: samples must be >= 1");
  const MixedBall ball = build_mixed_ball(n, dim);
  const auto counts = parallel_accumulate<MixedCounts>(samples, threads, [&](std::uint64_t i, MixedCounts& acc) {
    std::vector<std::uint8_t> site, bond;
    open_states(draw_mixed_sample(ball, seed, i), params, site, bond);
    ++acc.samples;
    acc.successes += mixed_connects(ball, site, bond);
  });
  ThetaEstimate e = ThetaEstimate::from_counts(counts.successes, counts.samples);
  e.lattice = "mixed:Z" + std::to_string(dim);
  e.kappa = 0;
  e.t = 0.0;
  e.n = n;
  e.seed = seed;
  e.mode = "l1-sphere";
  return e;
}

PivotalEstimate pivotality_estimate(const MixedParams& params, int n, std::uint64_t samples, std::uint64_t seed,
                                    unsigned threads) {
  params.validate();
  if (samples < 1) throw std::invalid_argument("pivotality: samples must be >= 1");
  const MixedBall ball = build_mixed_ball(n, 2);
  const auto counts = parallel_accumulate<MixedCounts>(samples, threads, [&](std::uint64_t i, MixedCounts& acc) {
    std::vector<std::uint8_t> site, bond;
    open_states(draw_mixed_sample(ball, seed, i), params, site, bond);
    std::vector<std::uint8_t> expanded(ball.vertices.size(), 0), reached(ball.vertices.size(), 0);
    const bool a = explore_ball(ball, site, bond, &expanded, &reached);
    std::uint64_t site_piv = 0, bond_piv = 0;
    // Only elements touching the explored region can change the outcome.
    for (std::size_t x = 0; x < ball.vertices.size(); ++x) {
      if (static_cast<int>(x) == ball.origin || ball.target[x]) continue;
      if (a ? !(site[x] && expanded[x]) : !(!site[x] && reached[x])) continue;
      site[x] ^= 1;
      site_piv += mixed_connects(ball, site, bond) != a;
      site[x] ^= 1;
    }
    for (std::size_t e = 0; e < ball.edges.size(); ++e) {
      const bool touches = expanded[ball.edges[e][0]] || expanded[ball.edges[e][1]];
      if (!touches || static_cast<bool>(bond[e]) != a) continue;
      bond[e] ^= 1;
      bond_piv += mixed_connects(ball, site, bond) != a;
      bond[e] ^= 1;
    }
    ++acc.samples;
    acc.successes += a;
    acc.site_sum += site_piv;
    acc.site_sq += site_piv * site_piv;
    acc.bond_sum += bond_piv;
    acc.bond_sq += bond_piv * bond_piv;
  });
  PivotalEstimate out;
  out.samples = counts.samples;
  out.theta = static_cast<double>(counts.successes) / static_cast<double>(counts.samples);
  std::tie(out.site_sum, out.site_std_error) = mean_and_error(counts.site_sum, counts.site_sq, counts.samples);
  std::tie(out.bond_sum, out.bond_std_error) = mean_and_error(counts.bond_sum, counts.bond_sq, counts.samples);
  return out;
}

namespace {

FiniteDifference finite_difference(const MixedParams& lo, const MixedParams& hi, double eps, int n,
                                   std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite difference: eps must be positive");
  lo.validate();
  hi.validate();
  if (samples < 1) throw std::invalid_argument("finite difference: samples must be >= 1");
  const MixedBall ball = build_mixed_ball(n, 2);
  const auto counts = parallel_accumulate<MixedCounts>(samples, threads, [&](std::uint64_t i, MixedCounts& acc) {
    const MixedSample sample = draw_mixed_sample(ball, seed, i);
    std::vector<std::uint8_t> site, bond;
    open_states(sample, hi, site, bond);
    const int up = mixed_connects(ball, site, bond);
    open_states(sample, lo, site, bond);
    const int down = mixed_connects(ball, site, bond);
    ++acc.samples;
    // Monotone coupling: up - down is 0 or 1.
    acc.successes += static_cast<std::uint64_t>(up - down);
  });
  const double q = static_cast<double>(counts.successes) / static_cast<double>(counts.samples);
  return {q / (2 * eps), std::sqrt(q * (1 - q) / static_cast<double>(counts.samples)) / (2 * eps)};
}

}  // namespace

FiniteDifference finite_difference_site(const MixedParams& params, int n, double eps, std::uint64_t samples,
                                        std::uint64_t seed, unsigned threads) {
  return finite_difference({params.s - eps, params.b}, {params.s + eps, params.b}, eps, n, samples, seed, threads);
}

FiniteDifference finite_difference_bond(const MixedParams& params, int n, double eps, std::uint64_t samples,
                                        std::uint64_t seed, unsigned threads) {
  return finite_difference({params.s, params.b - eps}, {params.s, params.b + eps}, eps, n, samples, seed, threads);
}

double russo_ratio_factor(const MixedParams& params) {
  params.validate();
  if (params.s <= 0.0 || params.b >= 1.0) throw std::invalid_argument("russo ratio: need s > 0 and b < 1");
  return (4.0 - 3.0 * params.b) / (2.0 * params.s * (1.0 - params.b));
}

}  // namespace cdp
