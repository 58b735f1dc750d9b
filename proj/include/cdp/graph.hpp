#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "cdp/lattice.hpp"
#include "cdp/rng.hpp"

namespace cdp {

/// Finite undirected simple graph with one clock counter per edge. Edge
/// indices double as the tie-break order of the dynamics.
class Graph {
 public:
  struct Incidence {
    int neighbor;
    int edge;
  };

  Graph() = default;
  /// Explicit graph; edge i gets a counter derived from its index.
  Graph(int num_vertices, std::vector<std::array<int, 2>> edges);
  Graph(int num_vertices, std::vector<std::array<int, 2>> edges, std::vector<FieldCounter> counters);

  int num_vertices() const { return num_vertices_; }
  int num_edges() const { return static_cast<int>(ends_.size()); }
  const std::array<int, 2>& ends(int e) const { return ends_[e]; }
  const FieldCounter& counter(int e) const { return counters_[e]; }
  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }
  int max_degree() const;

  const Incidence* incidences_begin(int v) const { return incidence_.data() + offsets_[v]; }
  const Incidence* incidences_end(int v) const { return incidence_.data() + offsets_[v + 1]; }

 private:
  void build_adjacency();

  int num_vertices_ = 0;
  std::vector<std::array<int, 2>> ends_;
  std::vector<FieldCounter> counters_;
  std::vector<int> offsets_;
  std::vector<Incidence> incidence_;
};

/// Small named graphs used by the exact oracle: path2 (a-b-c), path3,
/// star3, cycle4, grid2x3 (two unit squares sharing an edge), k4.
Graph named_graph(const std::string& name);
std::vector<std::string> named_graph_names();

/// A lattice window materialised as a Graph, edges in canonical EdgeId order.
struct LatticeWindow {
  LatticeSpec spec;
  Graph graph;
  std::vector<EdgeId> edge_ids;
  std::vector<int> edge_direction;
  /// Flattened coordinates, `spec.dim` entries per vertex.
  std::vector<int> coords;
  int origin = 0;

  int vertex_index(const Vertex& v) const;
  Vertex vertex(int index) const;
  int edge_index(const EdgeId& e) const;
  /// Max |coordinate| of vertex `index`.
  int sup_norm(int index) const;
};

LatticeWindow build_window(const LatticeSpec& spec);

}  // namespace cdp
