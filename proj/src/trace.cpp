#include "cdp/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cdp {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("trace: bad number '" + s + "' in " + what);
  }
  if (pos != s.size()) throw std::invalid_argument("trace: bad number '" + s + "' in " + what);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

PlanePoint parse_point(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw std::invalid_argument("trace: bad vertex '" + s + "'");
  try {
    return {std::stoi(parts[0]), std::stoi(parts[1])};
  } catch (const std::exception&) {
    throw std::invalid_argument("trace: bad vertex '" + s + "'");
  }
}

TraceEvent parse_event_token(const std::string& tok) {
  TraceEvent ev;
  const auto colon = tok.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("trace: bad event '" + tok + "'");
  const std::string tag = tok.substr(0, colon);
  const std::string rest = tok.substr(colon + 1);
  const auto split_at = [&](const std::string& marker) {
    const auto at = rest.rfind(marker);
    if (at == std::string::npos) throw std::invalid_argument("trace: bad event '" + tok + "'");
    ev.edge = parse_edge_id(rest.substr(0, at));
    ev.relation = marker;
    ev.value = parse_double(rest.substr(at + marker.size()), tok);
  };
  if (tag == "F" || tag == "S") {
    ev.kind = tag == "F" ? TraceEvent::Kind::feasibility : TraceEvent::Kind::spoil;
    split_at("=");
  } else if (tag == "B+") {
    ev.kind = TraceEvent::Kind::boundary_add;
    split_at(rest.rfind("<=") != std::string::npos ? "<=" : ">=");
  } else if (tag == "B-") {
    ev.kind = TraceEvent::Kind::boundary_remove;
    ev.edge = parse_edge_id(rest);
  } else {
    throw std::invalid_argument("trace: unknown event tag '" + tag + "'");
  }
  return ev;
}

}  // namespace

void write_trace(std::ostream& out, const PlanarTrace& trace) {
  out << "# variant=" << to_string(trace.variant) << " kappa=" << trace.kappa << " t=" << fmt(trace.t) << '\n';
  for (const auto& st : trace.steps) {
    out << st.step << '\t' << st.vertex[0] << ',' << st.vertex[1] << '\t' << st.decision << '\t';
    for (std::size_t i = 0; i < st.events.size(); ++i) {
      const auto& ev = st.events[i];
      if (i) out << ';';
      switch (ev.kind) {
        case TraceEvent::Kind::feasibility: out << "F:" << to_string(ev.edge) << '=' << (ev.value != 0.0); break;
        case TraceEvent::Kind::spoil: out << "S:" << to_string(ev.edge) << '=' << fmt(ev.value); break;
        case TraceEvent::Kind::boundary_add:
          out << "B+:" << to_string(ev.edge) << ev.relation << fmt(ev.value);
          break;
        case TraceEvent::Kind::boundary_remove: out << "B-:" << to_string(ev.edge); break;
      }
    }
    out << '\n';
  }
}

std::string format_trace(const PlanarTrace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

PlanarTrace parse_trace(std::istream& in) {
  PlanarTrace trace;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw std::invalid_argument("trace: missing header line");
  bool have_variant = false, have_kappa = false, have_t = false;
  std::stringstream hs(line.substr(2));
  std::string kv;
  while (hs >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("trace: bad header field '" + kv + "'");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    if (key == "variant") {
      trace.variant = parse_planar_variant(value);
      have_variant = true;
    } else if (key == "kappa") {
      trace.kappa = static_cast<int>(parse_double(value, "kappa"));
      have_kappa = true;
    } else if (key == "t") {
      trace.t = parse_double(value, "t");
      have_t = true;
    }
  }
  if (!have_variant || !have_kappa || !have_t) throw std::invalid_argument("trace: header needs variant, kappa and t");

  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 4) throw std::invalid_argument("trace: line " + std::to_string(row) + " needs 4 fields");
    TraceStep st;
    try {
      st.step = std::stoull(fields[0]);
    } catch (const std::exception&) {
      throw std::invalid_argument("trace: bad step index on line " + std::to_string(row));
    }
    st.vertex = parse_point(fields[1]);
    st.decision = fields[2];
    if (st.decision.rfind("open", 0) != 0 && st.decision.rfind("closed", 0) != 0)
      throw std::invalid_argument("trace: bad decision '" + st.decision + "' on line " + std::to_string(row));
    if (!fields[3].empty())
      for (const auto& tok : split(fields[3], ';')) st.events.push_back(parse_event_token(tok));
    trace.steps.push_back(std::move(st));
  }
  return trace;
}

PlanarTrace parse_trace_text(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in);
}

DecouplingReport check_decoupling(const PlanarTrace& trace) {
  DecouplingReport report;
  const PlanarGeometry geom{trace.variant};
  std::map<EdgeId, std::pair<PlanePoint, PlanePoint>> boundary;  // edge -> (centre, leaf)
  std::map<EdgeId, double> spoilt;
  std::map<PlanePoint, int> leaf_count;
  std::set<PlanePoint> treated;

  for (const auto& st : trace.steps) {
    std::vector<std::string> bad;
    const PlanePoint a = st.vertex;
    const bool opened = st.decision.rfind("open", 0) == 0;
    if (!treated.insert(a).second) bad.push_back("vertex treated twice");
    const auto inc = geom.incident(a);
    const auto find_incident = [&](const EdgeId& e) -> const IncidentEdge* {
      for (const auto& ie : inc)
        if (ie.id == e) return &ie;
      return nullptr;
    };

    for (const auto& ev : st.events) {
      const std::string name = to_string(ev.edge);
      const IncidentEdge* ie = find_incident(ev.edge);
      if (!ie) {
        bad.push_back("event on edge " + name + " not incident to the treated vertex");
        continue;
      }
      switch (ev.kind) {
        case TraceEvent::Kind::feasibility:
          if (spoilt.count(ev.edge)) bad.push_back("feasibility re-revealed for spoilt edge " + name);
          break;
        case TraceEvent::Kind::spoil:
          if (!(ev.value >= 0.0 && ev.value <= 1.0)) bad.push_back("spoilt clock of " + name + " outside [0,1]");
          if (boundary.count(ev.edge)) bad.push_back("edge " + name + " spoilt while still boundary");
          spoilt[ev.edge] = ev.value;
          break;
        case TraceEvent::Kind::boundary_remove: {
          const auto it = boundary.find(ev.edge);
          if (it == boundary.end()) {
            bad.push_back("removal of non-boundary edge " + name);
          } else {
            --leaf_count[it->second.second];
            boundary.erase(it);
          }
          break;
        }
        case TraceEvent::Kind::boundary_add:
          if (ev.relation != "<=") bad.push_back("boundary edge " + name + " carries a lower bound");
          if (!(ev.value >= 0.0 && ev.value <= trace.t))
            bad.push_back("boundary bound of " + name + " is " + fmt(ev.value) + ", above t");
          if (!opened) bad.push_back("boundary edge " + name + " added by a closed vertex");
          if (ie->role != EdgeRole::in_plane) bad.push_back("boundary edge " + name + " leaves the plane");
          if (spoilt.count(ev.edge)) bad.push_back("boundary edge " + name + " is already spoilt");
          if (treated.count(ie->neighbor)) bad.push_back("boundary edge " + name + " leads to a treated vertex");
          if (++leaf_count[ie->neighbor] != 1)
            bad.push_back("leaf of boundary edge " + name + " has several boundary edges");
          boundary[ev.edge] = {a, ie->neighbor};
          break;
      }
    }
    if (leaf_count[a] != 0) bad.push_back("treated vertex keeps a boundary edge");
    for (const auto& ie : inc)
      if (!spoilt.count(ie.id) && !boundary.count(ie.id))
        bad.push_back("edge " + to_string(ie.id) + " at treated vertex neither spoilt nor boundary");

    for (auto& msg : bad) {
      if (!report.first_violation_step) report.first_violation_step = st.step;
      report.violations.push_back("step " + std::to_string(st.step) + ": " + msg);
    }
  }
  report.ok = report.violations.empty();
  return report;
}

}  // namespace cdp
