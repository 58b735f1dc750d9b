#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cdp/dynamics.hpp"

namespace cdp {

/// s_c(1) <= 0.6795 for site-bond percolation on Z^2 (Wierman).
inline constexpr double kWiermanConstant = 0.6795;
/// Numerical site threshold of Z^2 (Ziff); a reference value, not derived.
inline constexpr double kSiteThresholdZ2 = 0.5927;

struct MixedParams {
  double s = 1.0;
  double b = 1.0;
  void validate() const;
};

/// exp(-(2/3)(b - 1/2 + (1/3) log((8-6b)/5))), b in [1/2, 1].
double sc_upper(double b);

struct OdeResult {
  double step = 0.0;
  std::vector<std::pair<double, double>> points;  // (b, s)
  double max_error_estimate = 0.0;
};

/// RK4 for ds/db = -2s(1-b)/(4-3b), s(1/2) = 1, with a step-doubling error
/// estimate per step; throws std::runtime_error if it exceeds `tolerance`.
OdeResult ode_integrate(double b_end, double step = 1e-4, double tolerance = 1e-10);

/// corollary-supercritical, hammersley-supercritical, both or unknown.
std::string classify_region(const MixedParams& params, double constant = kWiermanConstant);

struct CurvePoint {
  double b = 0.0;
  double sc_upper = 0.0;
  double hammersley_s = 0.0;
  /// Which criterion gives the smaller site threshold at this b.
  std::string region;
};

std::vector<CurvePoint> emit_curve(double b_min, double b_max, double step, double constant = kWiermanConstant);
std::string csv_header_curve();
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

/// Root of sc_upper(b) = constant/b on (1/2, 1) by bisection.
double crossover_solve(double constant = kWiermanConstant, double tolerance = 1e-12);

/// The L1 ball |x|_1 <= n+1 of Z^dim with site and bond counters; the
/// target is the sphere |x|_1 = n+1.
struct MixedBall {
  int n = 0;
  int dim = 2;
  std::vector<Vertex> vertices;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::vector<std::pair<int, int>>> adjacency;  // (neighbor, edge)
  std::vector<std::uint8_t> target;
  std::vector<FieldCounter> site_counters, bond_counters;
  int origin = 0;
};
MixedBall build_mixed_ball(int n, int dim);

/// Sample i draws sites from derive_seed(seed, i, 1) and bonds from
/// derive_seed(seed, i, 2); uniforms are keyed by coordinates, so the same
/// seed couples every (s, b, n).
struct MixedSample {
  std::vector<double> site_u, bond_u;
};
MixedSample draw_mixed_sample(const MixedBall& ball, std::uint64_t seed, std::uint64_t index);

/// 0 <-> target with open interior sites (origin and target exempt) and open bonds.
bool mixed_connects(const MixedBall& ball, const std::vector<std::uint8_t>& site_open,
                    const std::vector<std::uint8_t>& bond_open);

ThetaEstimate theta_n_mixed(const MixedParams& params, int n, std::uint64_t samples, std::uint64_t seed, int dim = 2,
                            unsigned threads = 1);

struct PivotalEstimate {
  std::uint64_t samples = 0;
  double theta = 0.0;
  double site_sum = 0.0, site_std_error = 0.0;
  double bond_sum = 0.0, bond_std_error = 0.0;
};

/// Monte Carlo of sum_x P(x pivotal) and sum_e P(e pivotal) for 0 <-> target.
PivotalEstimate pivotality_estimate(const MixedParams& params, int n, std::uint64_t samples, std::uint64_t seed,
                                    unsigned threads = 1);

struct FiniteDifference {
  double value = 0.0;
  double std_error = 0.0;
};

/// Central differences (theta(x+eps) - theta(x-eps)) / 2eps with common
/// random numbers across the two evaluations.
FiniteDifference finite_difference_site(const MixedParams& params, int n, double eps, std::uint64_t samples,
                                        std::uint64_t seed, unsigned threads = 1);
FiniteDifference finite_difference_bond(const MixedParams& params, int n, double eps, std::uint64_t samples,
                                        std::uint64_t seed, unsigned threads = 1);

/// (4-3b) / (2s(1-b)): bound on the ratio of the site to the bond derivative.
double russo_ratio_factor(const MixedParams& params);

}  // namespace cdp
