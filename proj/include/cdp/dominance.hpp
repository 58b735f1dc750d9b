#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cdp {

struct TallyCounts {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
};

/// Trials and successes per named context. Merging is plain addition, so
/// tallies from independent runs combine in any order.
class DominanceTally {
 public:
  void record(const std::string& context, bool success);
  void add(const std::string& context, TallyCounts counts);
  void merge(const DominanceTally& other);

  const std::map<std::string, TallyCounts>& contexts() const { return contexts_; }
  TallyCounts get(const std::string& context) const;
  std::uint64_t total_trials() const;
  bool empty() const { return contexts_.empty(); }

  /// CSV with header "context,trials,successes".
  void write_csv(std::ostream& out) const;
  static DominanceTally read_csv(std::istream& in);

 private:
  std::map<std::string, TallyCounts> contexts_;
};

struct DominanceVerdict {
  std::string context;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double frequency = 0.0;
  double lower_bound = 0.0;
  double threshold = 0.0;
  bool pass = false;

  /// PASS or INCONCLUSIVE; a finite sample never refutes the bound.
  std::string verdict() const { return pass ? "PASS" : "INCONCLUSIVE"; }
};

struct DominanceReport {
  double confidence = 0.99;
  std::vector<DominanceVerdict> verdicts;

  bool all_pass() const;
};

/// For every thresholded context: PASS iff the one-sided Clopper-Pearson
/// lower bound at `confidence` exceeds the threshold. Throws if a
/// thresholded context has no trials.
DominanceReport dominance_report(const DominanceTally& tally, const std::map<std::string, double>& thresholds,
                                 double confidence = 0.99);

/// "open" -> s and "activate" -> b for the projected exploration.
std::map<std::string, double> general_thresholds(double s, double b);

/// "X=k:N>=j" -> P(Binomial(k, p) >= j) for k in {1,2,3}, 1 <= j <= k.
std::map<std::string, double> planar_thresholds(double p, int max_inactive = 3);

std::string planar_context(int inactive, int at_least);

}  // namespace cdp
