#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cdp/exploration.hpp"

namespace cdp {

/// Line-oriented dump of a planar run. Header "# variant=<v> kappa=<k> t=<t>",
/// then one tab-separated line per step: step, vertex "x,y", decision and
/// ';'-separated events:
///   F:<edge>=0|1        feasibility revealed
///   S:<edge>=<u>        edge spoilt, clock revealed
///   B+:<edge><=<p>      edge becomes boundary with upper bound p
///   B-:<edge>           edge leaves the boundary
void write_trace(std::ostream& out, const PlanarTrace& trace);
std::string format_trace(const PlanarTrace& trace);
/// Throws std::invalid_argument on malformed input.
PlanarTrace parse_trace(std::istream& in);
PlanarTrace parse_trace_text(const std::string& text);

struct DecouplingReport {
  bool ok = true;
  std::optional<std::uint64_t> first_violation_step;
  std::vector<std::string> violations;
};

/// Replays the revealed information step by step and checks that boundary
/// edges form stars centred at open vertices whose leaves are untreated and
/// carry a single boundary edge, that the only knowledge about a boundary
/// edge is an upper bound p(e) <= t, that spoilt clocks lie in [0,1] and
/// are disjoint from the boundary, and that every edge at a treated vertex
/// ends up spoilt or boundary.
DecouplingReport check_decoupling(const PlanarTrace& trace);

}  // namespace cdp
