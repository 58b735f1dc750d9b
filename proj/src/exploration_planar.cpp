#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "cdp/exploration.hpp"
#include "cdp/graph.hpp"

namespace cdp {

std::string to_string(PlanarVariant v) { return v == PlanarVariant::cubic ? "cubic" : "matching-square"; }

PlanarVariant parse_planar_variant(const std::string& text) {
  if (text == "cubic") return PlanarVariant::cubic;
  if (text == "matching-square") return PlanarVariant::matching_square;
  throw std::invalid_argument("variant must be 'cubic' or 'matching-square', got '" + text + "'");
}

LatticeKind PlanarGeometry::kind() const {
  return variant == PlanarVariant::cubic ? LatticeKind::hypercubic : LatticeKind::matching_square;
}

Vertex PlanarGeometry::embed(const PlanePoint& p) const {
  if (variant == PlanarVariant::cubic) return {p[0], p[1], 0};
  return {p[0], p[1]};
}

std::vector<IncidentEdge> PlanarGeometry::incident(const PlanePoint& p) const {
  const Vertex v = embed(p);
  const LatticeKind k = kind();
  std::vector<IncidentEdge> out;
  out.reserve(degree());
  out.push_back({edge_towards(k, v, 0, 1), EdgeRole::in_plane, {p[0] + 1, p[1]}});
  out.push_back({edge_towards(k, v, 0, -1), EdgeRole::in_plane, {p[0] - 1, p[1]}});
  out.push_back({edge_towards(k, v, 1, 1), EdgeRole::in_plane, {p[0], p[1] + 1}});
  out.push_back({edge_towards(k, v, 1, -1), EdgeRole::in_plane, {p[0], p[1] - 1}});
  if (variant == PlanarVariant::cubic) {
    out.push_back({edge_towards(k, v, 2, 1), EdgeRole::out_of_plane, {}});
    out.push_back({edge_towards(k, v, 2, -1), EdgeRole::out_of_plane, {}});
  } else {
    out.push_back({edge_towards(k, v, 2, 1), EdgeRole::out_of_plane, {}});
    out.push_back({edge_towards(k, v, 3, 1), EdgeRole::out_of_plane, {}});
    out.push_back({edge_towards(k, v, 2, -1), EdgeRole::other, {}});
    out.push_back({edge_towards(k, v, 3, -1), EdgeRole::other, {}});
  }
  return out;
}

int PlanarExplorationState::max_radius() const {
  int r = 0;
  for (const auto& v : active) r = std::max({r, std::abs(v.position[0]), std::abs(v.position[1])});
  return r;
}

PlanarExploration explore_planar(PlanarVariant variant, int kappa, double t, const ClockField& clocks,
                                 StopCondition stop, bool record_trace) {
  const PlanarGeometry geom{variant};
  if (kappa < 1 || kappa > geom.degree()) throw std::invalid_argument("explore_planar: need 1 <= kappa <= degree");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("explore_planar: t must lie in [0,1]");

  PlanarExploration run;
  run.variant = variant;
  auto& st = run.state;
  if (record_trace) run.trace = PlanarTrace{variant, kappa, t, {}};
  const LatticeKind kind = geom.kind();
  bool radius_reached = false;

  const auto activate = [&](const PlanePoint& p, std::optional<EdgeId> via) {
    radius_reached = radius_reached || std::max(std::abs(p[0]), std::abs(p[1])) >= stop.radius;
    const int idx = static_cast<int>(st.active.size());
    st.index_of.emplace(p, idx);
    st.active.push_back({p, PlanarStatus::untreated, std::move(via)});
    st.untreated.push_back(idx);
  };
  activate({0, 0}, std::nullopt);

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
    const PlanePoint p = st.active[a].position;
    const bool is_origin = a == 0;
    TraceStep ts;
    ts.step = st.step;
    ts.vertex = p;
    ++st.step;

    const auto emit = [&](TraceEvent::Kind k, const EdgeId& e, std::string rel, double value) {
      if (record_trace) ts.events.push_back({k, e, std::move(rel), value});
    };
    const auto spoil = [&](const EdgeId& e) {
      if (const auto it = st.boundary.find(e); it != st.boundary.end()) {
        st.boundary.erase(it);
        emit(TraceEvent::Kind::boundary_remove, e, "", 0.0);
      }
      if (!st.spoilt.count(e)) {
        const double u = clocks.edge(kind, e);
        st.spoilt.emplace(e, u);
        emit(TraceEvent::Kind::spoil, e, "=", u);
      }
    };
    const auto finish = [&](PlanarStatus status, std::string decision) {
      st.active[a].status = status;
      if (status == PlanarStatus::open) ++st.open;
      else ++st.closed;
      if (record_trace) {
        ts.decision = std::move(decision);
        run.trace->steps.push_back(std::move(ts));
      }
    };

    const std::vector<IncidentEdge> inc = geom.incident(p);
    std::vector<int> inactive;
    for (int i = 0; i < static_cast<int>(inc.size()); ++i)
      if (inc[i].role == EdgeRole::in_plane && !st.index_of.count(inc[i].neighbor)) inactive.push_back(i);

    if (inactive.empty()) {
      for (const auto& e : inc) spoil(e.id);
      finish(PlanarStatus::closed, "closed:no-inactive");
      continue;
    }

    std::vector<double> u(inc.size());
    int feasible_count = 0;
    for (std::size_t i = 0; i < inc.size(); ++i) {
      if (const auto it = st.spoilt.find(inc[i].id); it != st.spoilt.end()) {
        u[i] = it->second;
      } else {
        u[i] = clocks.edge(kind, inc[i].id);
        emit(TraceEvent::Kind::feasibility, inc[i].id, "=", u[i] <= t ? 1.0 : 0.0);
      }
      feasible_count += u[i] <= t;
    }
    std::vector<int> gamma;
    for (int i : inactive)
      if (u[i] <= t) gamma.push_back(i);

    bool opened = false;
    double bound = t;
    std::string decision;
    if (feasible_count <= kappa) {
      opened = true;
      decision = "open:unsaturated";
    } else if (feasible_count == kappa + 1) {
      int best = -1;
      const auto consider = [&](int i) {
        if (best < 0 || u[i] > u[best]) best = i;
      };
      for (int i : gamma) consider(i);
      for (std::size_t i = 0; i < inc.size(); ++i) {
        if (inc[i].role == EdgeRole::out_of_plane) consider(static_cast<int>(i));
        if (st.active[a].activating_edge && inc[i].id == *st.active[a].activating_edge) consider(static_cast<int>(i));
      }
      opened = inc[best].role == EdgeRole::out_of_plane;
      bound = u[best];
      decision = opened ? "open:rescued" : "closed:rescue-failed";
      run.tally.record(is_origin ? "rescue:origin" : "rescue:X=" + std::to_string(inactive.size()), opened);
    } else {
      decision = "closed:oversaturated";
    }

    if (!is_origin) {
      const int n_activated = opened ? static_cast<int>(gamma.size()) : 0;
      for (int j = 1; j <= static_cast<int>(inactive.size()); ++j)
        run.tally.record(planar_context(static_cast<int>(inactive.size()), j), n_activated >= j);
    }

    if (!opened) {
      for (const auto& e : inc) spoil(e.id);
      finish(PlanarStatus::closed, decision);
      continue;
    }
    for (std::size_t i = 0; i < inc.size(); ++i)
      if (std::find(gamma.begin(), gamma.end(), static_cast<int>(i)) == gamma.end()) spoil(inc[i].id);
    for (int i : gamma) {
      st.boundary.emplace(inc[i].id, bound);
      emit(TraceEvent::Kind::boundary_add, inc[i].id, "<=", bound);
      activate(inc[i].neighbor, inc[i].id);
    }
    finish(PlanarStatus::open, decision);
  }
  return run;
}

SoundnessReport verify_planar_soundness(const PlanarExploration& run, int kappa, double t, const ClockField& clocks,
                                        int window_radius) {
  const PlanarVariant variant = run.trace ? run.trace->variant : run.variant;
  const PlanarGeometry geom{variant};
  // Every treated vertex needs its whole neighbourhood inside the window for
  // the replayed constraint to match the infinite lattice at that vertex.
  if (run.state.max_radius() + 1 > window_radius)
    throw std::invalid_argument("verify_planar_soundness: window radius " + std::to_string(window_radius) +
                                " too small for explored radius " + std::to_string(run.state.max_radius()));
  const LatticeSpec spec = variant == PlanarVariant::cubic
                               ? LatticeSpec::hypercubic(3, Boundary::free_box, window_radius)
                               : LatticeSpec::matching_square(Boundary::free_box, window_radius);
  const LatticeWindow w = build_window(spec);
  const std::vector<double> u = clocks.sample(w.graph);
  const Configuration config = evolve(w.graph, kappa, u, t);

  SoundnessReport report;
  std::vector<std::uint8_t> open_vertex(w.graph.num_vertices(), 0);
  for (const auto& v : run.state.active) {
    if (v.status != PlanarStatus::open) continue;
    ++report.checked_vertices;
    open_vertex[w.vertex_index(geom.embed(v.position))] = 1;
    if (!v.activating_edge) continue;
    ++report.checked_edges;
    if (!config.is_open(w.edge_index(*v.activating_edge)))
      report.violations.push_back("boundary edge " + to_string(*v.activating_edge) + " of open vertex " +
                                  to_string(geom.embed(v.position)) + " is closed in the dynamics");
  }

  std::vector<std::uint8_t> seen(w.graph.num_vertices(), 0);
  std::vector<int> queue{w.origin};
  seen[w.origin] = 1;
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (auto it = w.graph.incidences_begin(queue[h]); it != w.graph.incidences_end(queue[h]); ++it)
      if (config.is_open(it->edge) && !seen[it->neighbor]) {
        seen[it->neighbor] = 1;
        queue.push_back(it->neighbor);
      }
  for (int i = 0; i < w.graph.num_vertices(); ++i)
    if (open_vertex[i] && !seen[i])
      report.violations.push_back("open vertex " + to_string(w.vertex(i)) + " not in the cluster of 0");
  return report;
}

}  // namespace cdp
