#include "cdp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cdp/parallel.hpp"

namespace cdp {

std::vector<double> ClockField::sample(const Graph& g) const {
  std::vector<double> out(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) out[e] = field_(g.counter(e));
  return out;
}

int Configuration::open_count() const {
  return static_cast<int>(std::count(open.begin(), open.end(), std::uint8_t{1}));
}

namespace {

void check_kappa_t(int kappa, double t) {
  if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("t must lie in [0,1]");
}

}  // namespace

OpeningSchedule run_schedule(const Graph& g, int kappa, std::vector<double> clocks, double t_max) {
  check_kappa_t(kappa, t_max);
  if (static_cast<int>(clocks.size()) != g.num_edges()) throw std::invalid_argument("one clock per edge required");
  OpeningSchedule s;
  s.t_max = t_max;
  s.kappa = kappa;
  s.accepted.assign(g.num_edges(), 0);
  std::vector<int> order;
  order.reserve(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e)
    if (clocks[e] <= t_max) order.push_back(e);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return clocks[a] < clocks[b] || (clocks[a] == clocks[b] && a < b); });
  std::vector<int> degree(g.num_vertices(), 0);
  for (int e : order) {
    const auto [u, v] = g.ends(e);
    if (degree[u] < kappa && degree[v] < kappa) {
      s.accepted[e] = 1;
      ++degree[u];
      ++degree[v];
    }
  }
  s.clocks = std::move(clocks);
  return s;
}

Configuration OpeningSchedule::at(const Graph& g, double t) const {
  if (t > t_max) throw std::invalid_argument("schedule queried beyond t_max");
  Configuration c;
  c.t = t;
  c.kappa = kappa;
  c.open.assign(g.num_edges(), 0);
  c.degree.assign(g.num_vertices(), 0);
  for (int e = 0; e < g.num_edges(); ++e) {
    if (accepted[e] && clocks[e] <= t) {
      c.open[e] = 1;
      ++c.degree[g.ends(e)[0]];
      ++c.degree[g.ends(e)[1]];
    }
  }
  return c;
}

Configuration evolve(const Graph& g, int kappa, std::span<const double> clocks, double t) {
  return run_schedule(g, kappa, std::vector<double>(clocks.begin(), clocks.end()), t).at(g, t);
}

Configuration evolve(const Graph& g, int kappa, const ClockField& clocks, double t) {
  return run_schedule(g, kappa, clocks.sample(g), t).at(g, t);
}

std::optional<std::string> validate_configuration(const Graph& g, int kappa, std::span<const double> clocks,
                                                  const Configuration& config) {
  auto earlier = [&](int f, int e) { return clocks[f] < clocks[e] || (clocks[f] == clocks[e] && f < e); };
  for (int e = 0; e < g.num_edges(); ++e) {
    const bool feasible = clocks[e] <= config.t;
    if (!feasible) {
      if (config.open[e]) return "edge " + std::to_string(e) + " open with U_e > t";
      continue;
    }
    bool room = true;
    for (int endpoint : g.ends(e)) {
      int prior = 0;
      for (auto it = g.incidences_begin(endpoint); it != g.incidences_end(endpoint); ++it)
        if (it->edge != e && config.open[it->edge] && earlier(it->edge, e)) ++prior;
      if (prior >= kappa) room = false;
    }
    if (room != static_cast<bool>(config.open[e]))
      return "edge " + std::to_string(e) + (room ? " closed although both endpoints had room"
                                                  : " open although an endpoint was saturated");
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    int deg = 0;
    for (auto it = g.incidences_begin(v); it != g.incidences_end(v); ++it) deg += config.open[it->edge];
    if (deg != config.degree[v]) return "degree count mismatch at vertex " + std::to_string(v);
    if (deg > kappa) return "vertex " + std::to_string(v) + " exceeds kappa";
  }
  return std::nullopt;
}

double exact_event_probability(const Graph& g, int kappa, double t, const ConfigurationEvent& event) {
  check_kappa_t(kappa, t);
  const int m = g.num_edges();
  if (m > kMaxOracleEdges)
    throw std::invalid_argument("exact oracle supports at most " + std::to_string(kMaxOracleEdges) + " edges, got " +
                                std::to_string(m));
  double total = 0.0;
  std::vector<int> members;
  std::vector<int> degree(g.num_vertices());
  std::vector<std::uint8_t> open(m);
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    members.clear();
    for (int e = 0; e < m; ++e)
      if (mask & (1u << e)) members.push_back(e);
    const int k = static_cast<int>(members.size());
    const double weight = std::pow(t, k) * std::pow(1.0 - t, m - k);
    if (weight == 0.0) continue;
    std::uint64_t hits = 0, orderings = 0;
    do {
      std::fill(degree.begin(), degree.end(), 0);
      std::fill(open.begin(), open.end(), 0);
      for (int e : members) {
        const auto [u, v] = g.ends(e);
        if (degree[u] < kappa && degree[v] < kappa) {
          open[e] = 1;
          ++degree[u];
          ++degree[v];
        }
      }
      hits += event(open) ? 1 : 0;
      ++orderings;
    } while (std::next_permutation(members.begin(), members.end()));
    total += weight * static_cast<double>(hits) / static_cast<double>(orderings);
  }
  return total;
}

ConfigurationEvent parse_event(const std::string& text, const Graph& g) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("event must look like 'edge:<i>', got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  std::vector<int> ids;
  std::stringstream list(text.substr(colon + 1));
  std::string item;
  while (std::getline(list, item, ',')) {
    std::size_t used = 0;
    int id = -1;
    try {
      id = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || id < 0 || id >= g.num_edges())
      throw std::invalid_argument("event: edge index '" + item + "' out of range");
    ids.push_back(id);
  }
  if (ids.empty()) throw std::invalid_argument("event: no edge index given");
  if (kind == "edge" || kind == "edges") {
    if (kind == "edge" && ids.size() != 1) throw std::invalid_argument("event 'edge:' takes exactly one index");
    return [ids](const std::vector<std::uint8_t>& open) {
      return std::all_of(ids.begin(), ids.end(), [&](int e) { return open[e] != 0; });
    };
  }
  if (kind == "closed") {
    return [ids](const std::vector<std::uint8_t>& open) {
      return std::all_of(ids.begin(), ids.end(), [&](int e) { return open[e] == 0; });
    };
  }
  throw std::invalid_argument("unknown event kind '" + kind + "'");
}

ThetaEstimate ThetaEstimate::from_counts(std::uint64_t successes, std::uint64_t samples) {
  ThetaEstimate e;
  e.samples = samples;
  e.successes = successes;
  if (samples > 0) {
    e.estimate = static_cast<double>(successes) / static_cast<double>(samples);
    e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(samples));
  }
  return e;
}

std::string csv_header_theta() { return "spec,kappa,t,n,samples,estimate,stderr,seed,boundary_mode"; }

std::string csv_row(const ThetaEstimate& e) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%d,%llu,%.17g,%.17g,%llu,%s", e.lattice.c_str(), e.kappa, e.t, e.n,
                static_cast<unsigned long long>(e.samples), e.estimate, e.std_error,
                static_cast<unsigned long long>(e.seed), e.mode.c_str());
  return buf;
}

bool origin_crosses(const LatticeWindow& w, const std::vector<std::uint8_t>& open) {
  const Graph& g = w.graph;
  const int dim = w.spec.dim;
  const bool torus = w.spec.boundary == Boundary::torus;
  std::vector<std::uint8_t> seen(g.num_vertices(), 0);
  std::vector<int> displacement;
  if (torus) displacement.assign(static_cast<std::size_t>(g.num_vertices()) * dim, 0);
  std::vector<Vertex> offsets;
  for (int dir = 0; dir < w.spec.num_directions(); ++dir) offsets.push_back(direction_offset(w.spec.kind, dim, dir));
  std::vector<int> queue{w.origin};
  seen[w.origin] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int x = queue[head];
    if (!torus && w.sup_norm(x) == w.spec.radius) return true;
    for (auto it = g.incidences_begin(x); it != g.incidences_end(x); ++it) {
      if (!open[it->edge]) continue;
      const int y = it->neighbor;
      if (!torus) {
        if (!seen[y]) {
          seen[y] = 1;
          queue.push_back(y);
        }
        continue;
      }
      const int sign = g.ends(it->edge)[0] == x ? 1 : -1;
      const Vertex& off = offsets[w.edge_direction[it->edge]];
      const std::size_t bx = static_cast<std::size_t>(x) * dim, by = static_cast<std::size_t>(y) * dim;
      if (!seen[y]) {
        seen[y] = 1;
        for (int i = 0; i < dim; ++i) displacement[by + i] = displacement[bx + i] + sign * off[i];
        queue.push_back(y);
      } else {
        for (int i = 0; i < dim; ++i)
          if (displacement[by + i] != displacement[bx + i] + sign * off[i]) return true;
      }
    }
  }
  return false;
}

namespace {

struct Counts {
  std::vector<std::uint64_t> hits;
  void merge(const Counts& other) {
    if (hits.size() < other.hits.size()) hits.resize(other.hits.size(), 0);
    for (std::size_t i = 0; i < other.hits.size(); ++i) hits[i] += other.hits[i];
  }
};

ThetaEstimate labelled(const LatticeSpec& spec, int kappa, double t, int n, std::uint64_t seed, std::uint64_t hits,
                       std::uint64_t samples) {
  ThetaEstimate e = ThetaEstimate::from_counts(hits, samples);
  e.lattice = spec.kind_name();
  e.kappa = kappa;
  e.t = t;
  e.n = n;
  e.seed = seed;
  e.mode = spec.boundary == Boundary::torus ? "torus-wrap" : "box-boundary";
  return e;
}

}  // namespace

ThetaEstimate estimate_theta(const LatticeSpec& spec, int kappa, double t, int n, std::uint64_t samples,
                             std::uint64_t seed, unsigned threads) {
  return theta_curve(spec, kappa, {t}, n, samples, seed, threads).front();
}

std::vector<ThetaEstimate> theta_curve(const LatticeSpec& spec, int kappa, const std::vector<double>& t_grid, int n,
                                       std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (t_grid.empty()) throw std::invalid_argument("t-grid must not be empty");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw std::invalid_argument("t-grid must be sorted");
  for (double t : t_grid) check_kappa_t(kappa, t);
  LatticeSpec window_spec = spec;
  window_spec.radius = n;
  const LatticeWindow w = build_window(window_spec);
  const double t_max = t_grid.back();
  const Counts counts = parallel_accumulate<Counts>(samples, threads, [&](std::uint64_t i, Counts& acc) {
    if (acc.hits.empty()) acc.hits.assign(t_grid.size(), 0);
    const ClockField clocks(derive_seed(seed, i));
    const OpeningSchedule schedule = run_schedule(w.graph, kappa, clocks.sample(w.graph), t_max);
    for (std::size_t k = 0; k < t_grid.size(); ++k)
      acc.hits[k] += origin_crosses(w, schedule.at(w.graph, t_grid[k]).open) ? 1 : 0;
  });
  std::vector<ThetaEstimate> out;
  for (std::size_t k = 0; k < t_grid.size(); ++k)
    out.push_back(labelled(window_spec, kappa, t_grid[k], n, seed, counts.hits.empty() ? 0 : counts.hits[k], samples));
  return out;
}

}  // namespace cdp
