#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "cdp/exploration.hpp"

namespace cdp {

std::string to_string(Outcome o) { return o == Outcome::survived ? "survived" : "died"; }

int GeneralExplorationState::max_image_radius() const {
  int r = 0;
  for (const auto& v : active)
    for (int x : v.image) r = std::max(r, std::abs(x));
  return r;
}

namespace {

int sup_norm(const Vertex& v) {
  int r = 0;
  for (int x : v) r = std::max(r, std::abs(x));
  return r;
}

Vertex shifted(const Vertex& v, const Vertex& off) {
  Vertex out = v;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += off[i];
  return out;
}

}  // namespace

GeneralExploration explore_general(int d, int kappa, double t, const ProjectionMap& map, const ClockField& clocks,
                                   StopCondition stop) {
  if (d < 2) throw std::invalid_argument("explore_general: d must be >= 2");
  if (kappa < 1 || kappa > 2 * d) throw std::invalid_argument("explore_general: need 1 <= kappa <= 2d");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("explore_general: t must lie in [0,1]");
  if (map.source_dim() != d) throw std::invalid_argument("explore_general: projection map has wrong source dimension");

  GeneralExploration run;
  auto& st = run.state;
  const auto feasible = [&](const EdgeId& e) { return clocks.edge(LatticeKind::hypercubic, e) <= t; };
  bool radius_reached = false;

  const auto activate = [&](Vertex position, Vertex image, std::optional<EdgeId> via, int by) {
    if (st.images.count(image) || st.index_of.count(position))
      throw std::logic_error("explore_general: projection not injective on the active set");
    radius_reached = radius_reached || sup_norm(image) >= stop.radius;
    const int idx = static_cast<int>(st.active.size());
    st.index_of.emplace(position, idx);
    st.images.insert(image);
    st.active.push_back({std::move(position), std::move(image), GeneralStatus::untreated, std::move(via), by, -1});
    st.untreated.push_back(idx);
  };

  const Vertex origin(d, 0);
  activate(origin, map.project(origin), std::nullopt, -1);
  std::vector<Vertex> target_offsets;
  for (int dir = 0; dir < map.num_target_directions(); ++dir) target_offsets.push_back(map.target_offset(dir));

  while (true) {
    if (st.open >= stop.max_open || radius_reached) {
      run.outcome = Outcome::survived;
      break;
    }
    if (st.untreated.empty()) {
      run.outcome = Outcome::died;
      break;
    }
    const int a = st.untreated.front();
    st.untreated.pop_front();
    ++st.step;

    // Step 1
    std::vector<int> free_dirs;
    for (int dir = 0; dir < map.num_target_directions(); ++dir)
      if (!st.images.count(shifted(st.active[a].image, target_offsets[dir]))) free_dirs.push_back(dir);
    if (free_dirs.empty()) {
      st.active[a].status = GeneralStatus::useless;
      ++st.useless;
      continue;
    }
    int count = 0;
    for (int c = 0; c < d; ++c)
      for (int sign : {1, -1}) count += feasible(edge_towards(LatticeKind::hypercubic, st.active[a].position, c, sign));
    st.active[a].feasible_edges = count;
    const bool opened = count <= kappa;
    run.tally.record("open", opened);
    if (!opened) {
      st.active[a].status = GeneralStatus::closed;
      ++st.closed;
      continue;
    }
    st.active[a].status = GeneralStatus::open;
    ++st.open;
    if (st.open >= stop.max_open) continue;

    // Step 2
    ++st.step;
    const Vertex position = st.active[a].position;
    const Vertex image = st.active[a].image;
    for (int dir : free_dirs) {
      bool found = false;
      for (const EdgeId& e : map.fiber_edges(position, dir)) {
        if (!feasible(e)) continue;
        activate(other_endpoint(LatticeKind::hypercubic, e, position), shifted(image, target_offsets[dir]), e, a);
        found = true;
        break;
      }
      run.tally.record("activate", found);
    }
  }
  return run;
}

SoundnessReport verify_general_soundness(const GeneralExploration& run, int d, int kappa, double t,
                                         const ClockField& clocks) {
  SoundnessReport report;
  std::unordered_map<Vertex, int, VertexHash> vertex_index;
  std::unordered_map<EdgeId, int, EdgeIdHash> edge_index;
  std::vector<std::array<int, 2>> ends;
  std::vector<FieldCounter> counters;
  const auto vertex_id = [&](const Vertex& v) {
    const auto [it, inserted] = vertex_index.emplace(v, static_cast<int>(vertex_index.size()));
    return it->second;
  };
  vertex_id(Vertex(d, 0));
  for (const auto& v : run.state.active) {
    if (v.status != GeneralStatus::open) continue;
    const int vi = vertex_id(v.position);
    for (int c = 0; c < d; ++c) {
      for (int sign : {1, -1}) {
        EdgeId e = edge_towards(LatticeKind::hypercubic, v.position, c, sign);
        if (edge_index.count(e)) continue;
        const int wi = vertex_id(other_endpoint(LatticeKind::hypercubic, e, v.position));
        edge_index.emplace(e, static_cast<int>(ends.size()));
        ends.push_back({vi, wi});
        counters.push_back(edge_counter(LatticeKind::hypercubic, e));
      }
    }
  }
  const Graph g(static_cast<int>(vertex_index.size()), std::move(ends), std::move(counters));
  const std::vector<double> u = clocks.sample(g);
  const Configuration config = evolve(g, kappa, u, t);

  for (const auto& v : run.state.active) {
    if (v.status != GeneralStatus::open) continue;
    ++report.checked_vertices;
    const int vi = vertex_index.at(v.position);
    int feasible = 0;
    for (auto it = g.incidences_begin(vi); it != g.incidences_end(vi); ++it) feasible += u[it->edge] <= t;
    if (feasible > kappa)
      report.violations.push_back("open vertex " + to_string(v.position) + " has " + std::to_string(feasible) +
                                  " feasible edges");
    if (v.activating_edge) {
      ++report.checked_edges;
      if (!config.is_open(edge_index.at(*v.activating_edge)))
        report.violations.push_back("activating edge " + to_string(*v.activating_edge) + " of open vertex " +
                                    to_string(v.position) + " is closed in the dynamics");
    }
  }

  std::vector<std::uint8_t> seen(g.num_vertices(), 0);
  std::vector<int> queue{vertex_index.at(Vertex(d, 0))};
  seen[queue.front()] = 1;
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (auto it = g.incidences_begin(queue[h]); it != g.incidences_end(queue[h]); ++it)
      if (config.is_open(it->edge) && !seen[it->neighbor]) {
        seen[it->neighbor] = 1;
        queue.push_back(it->neighbor);
      }
  for (const auto& v : run.state.active)
    if (v.status == GeneralStatus::open && !seen[vertex_index.at(v.position)])
      report.violations.push_back("open vertex " + to_string(v.position) + " not in the cluster of 0");
  return report;
}

}  // namespace cdp
