#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cdp/dominance.hpp"
#include "cdp/dynamics.hpp"
#include "cdp/lattice.hpp"

namespace cdp {

struct StopCondition {
  std::uint64_t max_open = 10'000;
  /// Sup-norm radius of an active vertex's image (projected lattice or plane).
  int radius = 200;
};

enum class Outcome { survived, died };
std::string to_string(Outcome o);

// ---------------------------------------------------------------------------
// Projected exploration of Z^d through a ProjectionMap onto Z^{d'}.

enum class GeneralStatus : std::uint8_t { untreated, open, closed, useless };

struct GeneralVertex {
  Vertex position;
  Vertex image;
  GeneralStatus status = GeneralStatus::untreated;
  /// First feasible edge found from the activating open vertex; none for 0.
  std::optional<EdgeId> activating_edge;
  int activated_by = -1;
  int feasible_edges = -1;
};

struct GeneralExplorationState {
  std::uint64_t step = 0;
  std::vector<GeneralVertex> active;
  std::unordered_map<Vertex, int, VertexHash> index_of;
  std::unordered_set<Vertex, VertexHash> images;
  std::deque<int> untreated;
  std::uint64_t open = 0, closed = 0, useless = 0;

  int max_image_radius() const;
};

struct GeneralExploration {
  GeneralExplorationState state;
  DominanceTally tally;
  Outcome outcome = Outcome::died;
};

/// Step 1 treats the next untreated vertex (FIFO): useless if its image has
/// no neighbour outside the image of the active set, else open iff it has
/// at most kappa feasible edges among all 2d. Step 2 scans, for every free
/// image neighbour, the fibre edges of the new open vertex one by one and
/// activates the endpoint of the first feasible one.
GeneralExploration explore_general(int d, int kappa, double t, const ProjectionMap& map, const ClockField& clocks,
                                   StopCondition stop = {});

struct SoundnessReport {
  std::uint64_t checked_vertices = 0;
  std::uint64_t checked_edges = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Replays the dynamics on the subgraph made of every edge incident to an
/// open explored vertex and checks: open vertices have <= kappa feasible
/// edges, each activating edge between open vertices is open, and every
/// open vertex is in the cluster of 0.
SoundnessReport verify_general_soundness(const GeneralExploration& run, int d, int kappa, double t,
                                         const ClockField& clocks);

// ---------------------------------------------------------------------------
// Planar exploration with boundary and spoilt edges.

enum class PlanarVariant { cubic, matching_square };
std::string to_string(PlanarVariant v);
PlanarVariant parse_planar_variant(const std::string& text);

using PlanePoint = std::array<int, 2>;

struct PlanePointHash {
  std::size_t operator()(const PlanePoint& p) const noexcept {
    return static_cast<std::size_t>((static_cast<std::uint64_t>(static_cast<std::uint32_t>(p[0])) << 32) ^
                                    static_cast<std::uint32_t>(p[1])) *
           0x9E3779B97F4A7C15ULL;
  }
};

/// How an incident edge of a plane vertex is treated by the algorithm.
enum class EdgeRole : std::uint8_t {
  in_plane,      ///< to a plane neighbour; may be used to activate it
  out_of_plane,  ///< compared in the rescue of a vertex with one edge too many
  other,         ///< matching-square back diagonals: counted, never compared
};

struct IncidentEdge {
  EdgeId id;
  EdgeRole role;
  PlanePoint neighbor;  // meaningful for in_plane
};

/// Lattice-specific view used by the planar algorithm: Z^3 around the plane
/// z=0, or the matching-square lattice with the forward diagonals
/// (x,x+(1,1)), (x,x+(1,-1)) as the out-of-plane analogues.
struct PlanarGeometry {
  PlanarVariant variant;

  LatticeKind kind() const;
  int degree() const { return variant == PlanarVariant::cubic ? 6 : 8; }
  Vertex embed(const PlanePoint& p) const;
  std::vector<IncidentEdge> incident(const PlanePoint& p) const;
};

enum class PlanarStatus : std::uint8_t { untreated, open, closed };

struct PlanarVertex {
  PlanePoint position{};
  PlanarStatus status = PlanarStatus::untreated;
  /// b(a): the boundary edge through which the vertex was activated.
  std::optional<EdgeId> activating_edge;
};

struct TraceEvent {
  enum class Kind : std::uint8_t { feasibility, spoil, boundary_add, boundary_remove };
  Kind kind;
  EdgeId edge;
  /// For boundary_add: "<=" (upper bound, the only legal knowledge) or ">=".
  std::string relation;
  double value = 0.0;
};

struct TraceStep {
  std::uint64_t step = 0;
  PlanePoint vertex{};
  std::string decision;
  std::vector<TraceEvent> events;
};

struct PlanarTrace {
  PlanarVariant variant = PlanarVariant::cubic;
  int kappa = 5;
  double t = 0.62;
  std::vector<TraceStep> steps;
};

struct PlanarExplorationState {
  std::uint64_t step = 0;
  std::vector<PlanarVertex> active;
  std::unordered_map<PlanePoint, int, PlanePointHash> index_of;
  std::deque<int> untreated;
  /// B: boundary edges with their upper bound p(e) on U_e.
  std::unordered_map<EdgeId, double, EdgeIdHash> boundary;
  /// S: spoilt edges with their revealed clock.
  std::unordered_map<EdgeId, double, EdgeIdHash> spoilt;
  std::uint64_t open = 0, closed = 0;

  int max_radius() const;
};

struct PlanarExploration {
  PlanarVariant variant = PlanarVariant::cubic;
  PlanarExplorationState state;
  DominanceTally tally;
  Outcome outcome = Outcome::died;
  std::optional<PlanarTrace> trace;
};

PlanarExploration explore_planar(PlanarVariant variant, int kappa, double t, const ClockField& clocks,
                                 StopCondition stop = {}, bool record_trace = false);

/// Replays the dynamics on a free-box window of the variant's lattice with
/// the given radius (every treated vertex must have all its edges inside)
/// and checks that each b(v), v open, is open and that all open vertices
/// are in the cluster of 0.
SoundnessReport verify_planar_soundness(const PlanarExploration& run, int kappa, double t, const ClockField& clocks,
                                        int window_radius);

}  // namespace cdp
