#include "cdp/dominance.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cdp/stats.hpp"

namespace cdp {

void DominanceTally::record(const std::string& context, bool success) {
  auto& c = contexts_[context];
  ++c.trials;
  if (success) ++c.successes;
}

void DominanceTally::add(const std::string& context, TallyCounts counts) {
  if (counts.successes > counts.trials) throw std::invalid_argument("tally: successes exceed trials for " + context);
  auto& c = contexts_[context];
  c.trials += counts.trials;
  c.successes += counts.successes;
}

void DominanceTally::merge(const DominanceTally& other) {
  for (const auto& [name, counts] : other.contexts_) add(name, counts);
}

TallyCounts DominanceTally::get(const std::string& context) const {
  const auto it = contexts_.find(context);
  return it == contexts_.end() ? TallyCounts{} : it->second;
}

std::uint64_t DominanceTally::total_trials() const {
  std::uint64_t n = 0;
  for (const auto& [name, c] : contexts_) n += c.trials;
  return n;
}

void DominanceTally::write_csv(std::ostream& out) const {
  out << "context,trials,successes\n";
  for (const auto& [name, c] : contexts_) out << name << ',' << c.trials << ',' << c.successes << '\n';
}

DominanceTally DominanceTally::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "context,trials,successes")
    throw std::invalid_argument("tally csv: expected header 'context,trials,successes'");
  DominanceTally tally;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string name, trials, successes;
    if (!std::getline(ss, name, ',') || !std::getline(ss, trials, ',') || !std::getline(ss, successes))
      throw std::invalid_argument("tally csv: malformed row " + std::to_string(row));
    try {
      tally.add(name, {std::stoull(trials), std::stoull(successes)});
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("tally csv: malformed counts in row " + std::to_string(row));
    }
  }
  return tally;
}

bool DominanceReport::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return !verdicts.empty();
}

DominanceReport dominance_report(const DominanceTally& tally, const std::map<std::string, double>& thresholds,
                                 double confidence) {
  if (thresholds.empty()) throw std::invalid_argument("dominance report: no thresholds given");
  DominanceReport report;
  report.confidence = confidence;
  for (const auto& [context, threshold] : thresholds) {
    const TallyCounts c = tally.get(context);
    if (c.trials == 0) throw std::invalid_argument("dominance report: empty tally for context '" + context + "'");
    DominanceVerdict v;
    v.context = context;
    v.trials = c.trials;
    v.successes = c.successes;
    v.frequency = static_cast<double>(c.successes) / static_cast<double>(c.trials);
    v.lower_bound = stats::clopper_pearson_lower(c.successes, c.trials, confidence);
    v.threshold = threshold;
    v.pass = v.lower_bound > threshold;
    report.verdicts.push_back(v);
  }
  return report;
}

std::map<std::string, double> general_thresholds(double s, double b) { return {{"open", s}, {"activate", b}}; }

std::string planar_context(int inactive, int at_least) {
  return "X=" + std::to_string(inactive) + ":N>=" + std::to_string(at_least);
}

std::map<std::string, double> planar_thresholds(double p, int max_inactive) {
  std::map<std::string, double> out;
  for (int k = 1; k <= max_inactive; ++k)
    for (int j = 1; j <= k; ++j) out[planar_context(k, j)] = stats::binomial_upper_tail(k, p, j);
  return out;
}

}  // namespace cdp
