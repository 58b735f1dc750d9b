#include "cdp/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace cdp {

Graph::Graph(int num_vertices, std::vector<std::array<int, 2>> edges) : num_vertices_(num_vertices), ends_(std::move(edges)) {
  counters_.reserve(ends_.size());
  for (std::size_t i = 0; i < ends_.size(); ++i) {
    const std::int64_t word = static_cast<std::int64_t>(i);
    counters_.push_back(hash_words(0x6AA9E0001ULL, std::span<const std::int64_t>(&word, 1)));
  }
  build_adjacency();
}

Graph::Graph(int num_vertices, std::vector<std::array<int, 2>> edges, std::vector<FieldCounter> counters)
    : num_vertices_(num_vertices), ends_(std::move(edges)), counters_(std::move(counters)) {
  if (counters_.size() != ends_.size()) throw std::invalid_argument("graph: one counter per edge required");
  build_adjacency();
}

void Graph::build_adjacency() {
  offsets_.assign(num_vertices_ + 1, 0);
  for (const auto& [u, v] : ends_) {
    if (u < 0 || v < 0 || u >= num_vertices_ || v >= num_vertices_) throw std::invalid_argument("graph: vertex out of range");
    if (u == v) throw std::invalid_argument("graph: self-loops are not allowed");
    ++offsets_[u + 1];
    ++offsets_[v + 1];
  }
  for (int v = 0; v < num_vertices_; ++v) offsets_[v + 1] += offsets_[v];
  incidence_.resize(offsets_.back());
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (int e = 0; e < num_edges(); ++e) {
    const auto [u, v] = ends_[e];
    incidence_[fill[u]++] = {v, e};
    incidence_[fill[v]++] = {u, e};
  }
}

int Graph::max_degree() const {
  int best = 0;
  for (int v = 0; v < num_vertices_; ++v) best = std::max(best, degree(v));
  return best;
}

Graph named_graph(const std::string& name) {
  if (name == "path2") return Graph(3, {{0, 1}, {1, 2}});
  if (name == "path3") return Graph(4, {{0, 1}, {1, 2}, {2, 3}});
  if (name == "star3") return Graph(4, {{0, 1}, {0, 2}, {0, 3}});
  if (name == "cycle4") return Graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  // 0-1-2 / 3-4-5 with rungs 0-3, 1-4, 2-5
  if (name == "grid2x3") return Graph(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {0, 3}, {1, 4}, {2, 5}});
  if (name == "k4") return Graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  throw std::invalid_argument("unknown graph '" + name + "'");
}

std::vector<std::string> named_graph_names() { return {"path2", "path3", "star3", "cycle4", "grid2x3", "k4"}; }

int LatticeWindow::vertex_index(const Vertex& v) const {
  if (!in_window(spec, v)) throw std::out_of_range("vertex " + to_string(v) + " outside window");
  int index = 0;
  for (int x : v) index = index * spec.side() + (x + spec.radius);
  return index;
}

Vertex LatticeWindow::vertex(int index) const {
  return Vertex(coords.begin() + static_cast<std::ptrdiff_t>(index) * spec.dim,
                coords.begin() + static_cast<std::ptrdiff_t>(index + 1) * spec.dim);
}

int LatticeWindow::edge_index(const EdgeId& e) const {
  const auto it = std::lower_bound(edge_ids.begin(), edge_ids.end(), e);
  if (it == edge_ids.end() || *it != e) throw std::out_of_range("edge " + to_string(e) + " not in window");
  return static_cast<int>(it - edge_ids.begin());
}

int LatticeWindow::sup_norm(int index) const {
  int best = 0;
  for (int i = 0; i < spec.dim; ++i) best = std::max(best, std::abs(coords[static_cast<std::size_t>(index) * spec.dim + i]));
  return best;
}

LatticeWindow build_window(const LatticeSpec& spec) {
  spec.validate();
  LatticeWindow w;
  w.spec = spec;
  const int side = spec.side();
  long long count = 1;
  for (int i = 0; i < spec.dim; ++i) {
    count *= side;
    if (count > 50'000'000) throw std::invalid_argument("window " + spec.to_string() + " is too large to materialise");
  }
  const int n = static_cast<int>(count);
  w.coords.resize(static_cast<std::size_t>(n) * spec.dim);
  Vertex v(spec.dim, -spec.radius);
  std::vector<std::array<int, 2>> ends;
  std::vector<FieldCounter> counters;
  const int ndir = spec.num_directions();
  std::vector<Vertex> offsets;
  for (int dir = 0; dir < ndir; ++dir) offsets.push_back(direction_offset(spec.kind, spec.dim, dir));
  // lexicographic order, coordinate 0 most significant, so (tail, dir) order is EdgeId order
  for (int index = 0; index < n; ++index) {
    std::copy(v.begin(), v.end(), w.coords.begin() + static_cast<std::ptrdiff_t>(index) * spec.dim);
    for (int dir = 0; dir < ndir; ++dir) {
      Vertex h = v;
      for (int i = 0; i < spec.dim; ++i) h[i] += offsets[dir][i];
      if (spec.boundary == Boundary::free_box) {
        if (!in_window(spec, h)) continue;
      } else {
        h = wrap(spec, std::move(h));
      }
      EdgeId id{v, dir};
      ends.push_back({index, w.vertex_index(h)});
      counters.push_back(edge_counter(spec.kind, id));
      w.edge_ids.push_back(std::move(id));
      w.edge_direction.push_back(dir);
    }
    for (int i = spec.dim - 1; i >= 0; --i) {
      if (++v[i] <= spec.radius) break;
      v[i] = -spec.radius;
    }
  }
  w.graph = Graph(n, std::move(ends), std::move(counters));
  w.origin = w.vertex_index(Vertex(spec.dim, 0));
  return w;
}

}  // namespace cdp
