#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdp/graph.hpp"
#include "cdp/lattice.hpp"
#include "cdp/rng.hpp"

namespace cdp {

/// i.i.d. uniform clocks U_e, generated lazily from (seed, edge counter).
class ClockField {
 public:
  explicit ClockField(std::uint64_t seed) : field_(seed) {}

  double operator()(const FieldCounter& ctr) const { return field_(ctr); }
  double edge(LatticeKind kind, const EdgeId& e) const { return field_(edge_counter(kind, e)); }
  std::vector<double> sample(const Graph& g) const;
  std::uint64_t seed() const { return field_.seed(); }

 private:
  UniformField field_;
};

/// omega(t): open/closed state per edge plus open-degree per vertex.
struct Configuration {
  double t = 0.0;
  int kappa = 0;
  std::vector<std::uint8_t> open;
  std::vector<int> degree;

  bool is_open(int e) const { return open[e] != 0; }
  int open_count() const;
};

/// Result of running the dynamics up to t_max: which feasible edges were
/// accepted at their clock. For any t <= t_max, omega(t) is the set of
/// accepted edges with U_e <= t.
struct OpeningSchedule {
  double t_max = 0.0;
  int kappa = 0;
  std::vector<double> clocks;
  std::vector<std::uint8_t> accepted;

  Configuration at(const Graph& g, double t) const;
};

/// Processes edges with U_e <= t_max in increasing (U_e, edge index) order;
/// an edge opens iff both endpoints have fewer than kappa open edges.
OpeningSchedule run_schedule(const Graph& g, int kappa, std::vector<double> clocks, double t_max);

Configuration evolve(const Graph& g, int kappa, std::span<const double> clocks, double t);
Configuration evolve(const Graph& g, int kappa, const ClockField& clocks, double t);

/// Independent check of the constraint history: every open edge had fewer
/// than kappa strictly-earlier open edges at each endpoint, every closed
/// feasible edge had an endpoint with at least kappa, and open implies
/// U_e <= t. Returns a description of the first violation.
std::optional<std::string> validate_configuration(const Graph& g, int kappa, std::span<const double> clocks,
                                                  const Configuration& config);

/// Exact P(event at t) by enumerating feasible subsets and all their
/// orderings. Graphs with more than 10 edges are rejected.
using ConfigurationEvent = std::function<bool(const std::vector<std::uint8_t>& open)>;
double exact_event_probability(const Graph& g, int kappa, double t, const ConfigurationEvent& event);
inline constexpr int kMaxOracleEdges = 10;

/// "edge:<i>" -> edge i open; "edges:<i>,<j>,.." -> all open; "closed:<i>" -> edge i closed.
ConfigurationEvent parse_event(const std::string& text, const Graph& g);

enum class CrossingMode { box_boundary, torus_wrap };

struct ThetaEstimate {
  std::string lattice;
  int kappa = 0;
  double t = 0.0;
  int n = 0;
  std::uint64_t samples = 0;
  std::uint64_t successes = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  std::string mode;

  static ThetaEstimate from_counts(std::uint64_t successes, std::uint64_t samples);
};

std::string csv_header_theta();
std::string csv_row(const ThetaEstimate& e);

/// Whether the cluster of the origin reaches the window boundary (free box)
/// or wraps around the torus, in the given configuration.
bool origin_crosses(const LatticeWindow& w, const std::vector<std::uint8_t>& open);

/// Monte Carlo crossing probability on the window of radius n of `spec`'s
/// kind and boundary; sample i uses clocks seeded by derive_seed(seed, i).
ThetaEstimate estimate_theta(const LatticeSpec& spec, int kappa, double t, int n, std::uint64_t samples,
                             std::uint64_t seed, unsigned threads = 1);

/// One estimate per grid value with common clocks across t (monotone coupling).
std::vector<ThetaEstimate> theta_curve(const LatticeSpec& spec, int kappa, const std::vector<double>& t_grid, int n,
                                       std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

}  // namespace cdp
