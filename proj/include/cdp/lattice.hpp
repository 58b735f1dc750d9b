#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "cdp/rng.hpp"

namespace cdp {

enum class LatticeKind { hypercubic, matching_square };
enum class Boundary { free_box, torus };

/// A finite window of Z^d (hypercubic) or of the square lattice with both
/// face diagonals (matching-square). The window is [-radius, radius]^dim.
struct LatticeSpec {
  LatticeKind kind = LatticeKind::hypercubic;
  int dim = 2;
  Boundary boundary = Boundary::torus;
  int radius = 1;

  static LatticeSpec hypercubic(int d, Boundary boundary, int radius);
  static LatticeSpec matching_square(Boundary boundary, int radius);

  /// Parses "hypercubic:3", "matching-square"; boundary and radius given separately.
  static LatticeSpec parse(const std::string& kind, const std::string& boundary, int radius);

  int degree() const { return 2 * num_directions(); }
  /// Number of canonical (positive) edge directions per vertex.
  int num_directions() const { return kind == LatticeKind::hypercubic ? dim : 4; }
  int side() const { return 2 * radius + 1; }

  std::string kind_name() const;
  std::string boundary_name() const;
  std::string to_string() const;

  void validate() const;
};

using Vertex = std::vector<int>;

/// Canonical edge key: the tail vertex and the index of the positive
/// direction that leads to the head. On a free box or on the infinite
/// lattice the tail is the lexicographically smaller endpoint; on a torus
/// it is the endpoint from which the edge points in a positive direction.
struct EdgeId {
  Vertex tail;
  int direction = 0;

  auto operator<=>(const EdgeId&) const = default;
  bool operator==(const EdgeId&) const = default;
};

struct VertexHash {
  std::size_t operator()(const Vertex& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int x : v) h = (h ^ static_cast<std::uint32_t>(x)) * 0x100000001b3ULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct EdgeIdHash {
  std::size_t operator()(const EdgeId& e) const noexcept {
    return VertexHash{}(e.tail) * 31u + static_cast<std::size_t>(e.direction);
  }
};

std::string to_string(const Vertex& v);
std::string to_string(const EdgeId& e);
EdgeId parse_edge_id(const std::string& text);

/// Offset of positive direction `direction`; (1,0),(0,1),(1,1),(1,-1) for matching-square.
Vertex direction_offset(LatticeKind kind, int dim, int direction);

bool in_window(const LatticeSpec& spec, const Vertex& v);
/// Reduce coordinates into [-L, L] on a torus; identity on a free box.
Vertex wrap(const LatticeSpec& spec, Vertex v);

struct Neighbor {
  Vertex vertex;
  EdgeId edge;
};

/// Neighbors in the window, ordered (+dir0, -dir0, +dir1, -dir1, ...).
/// Throws std::out_of_range if v is outside the window.
std::vector<Neighbor> neighbors(const LatticeSpec& spec, const Vertex& v);

/// Endpoints (tail, head) with the head wrapped on a torus.
std::pair<Vertex, Vertex> endpoints(const LatticeSpec& spec, const EdgeId& e);

/// Unbounded-lattice helpers (exploration runs on the infinite lattice).
Vertex head_of(LatticeKind kind, const EdgeId& e);
/// Edge between v and v + sign * offset(direction).
EdgeId edge_towards(LatticeKind kind, const Vertex& v, int direction, int sign);
Vertex other_endpoint(LatticeKind kind, const EdgeId& e, const Vertex& v);

/// Clock counter of an edge; depends only on the lattice kind and the EdgeId.
FieldCounter edge_counter(LatticeKind kind, const EdgeId& e);
/// Counter of a site; used by mixed site-bond percolation.
FieldCounter site_counter(const Vertex& v);

/// Groups the d coordinate directions of Z^d into d' groups of floor(d/d')
/// directions each; Z^d -> Z^{d'} sums the coordinates of every group.
class ProjectionMap {
 public:
  /// d' = 2: first floor(d/2) coordinates east/west, last floor(d/2)
  /// north/south, the middle one (odd d) unassigned. d' >= 3: consecutive
  /// blocks starting at coordinate 1, leftover trailing coordinates unassigned.
  static ProjectionMap standard(int source_dim, int target_dim);

  /// Explicit groups of 0-based coordinate indices; validated.
  ProjectionMap(int source_dim, std::vector<std::vector<int>> groups);

  int source_dim() const { return source_dim_; }
  int target_dim() const { return static_cast<int>(groups_.size()); }
  int group_size() const { return group_size_; }
  const std::vector<int>& group(int g) const { return groups_.at(g); }
  /// -1 when the coordinate belongs to no group.
  int group_of(int coordinate) const { return group_of_.at(coordinate); }

  Vertex project(const Vertex& v) const;

  /// Target directions are numbered 2g (+e_g) and 2g+1 (-e_g).
  int num_target_directions() const { return 2 * target_dim(); }
  Vertex target_offset(int target_direction) const;

  /// Edges from o whose image is the step project(o) -> project(o) + target
  /// offset, ascending coordinate order.
  std::vector<EdgeId> fiber_edges(const Vertex& o, int target_direction) const;
  /// Same, addressed by the target vertex; throws std::invalid_argument if
  /// `target` is not adjacent to project(o).
  std::vector<EdgeId> fiber_edges(const Vertex& o, const Vertex& target) const;

 private:
  int source_dim_;
  int group_size_;
  std::vector<std::vector<int>> groups_;
  std::vector<int> group_of_;
};

}  // namespace cdp
