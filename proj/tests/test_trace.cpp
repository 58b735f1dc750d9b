#include <doctest.h>

#include <stdexcept>

#include "cdp/exploration.hpp"
#include "cdp/trace.hpp"

using namespace cdp;

namespace {

PlanarTrace traced_run(double t, std::uint64_t seed, int radius = 30) {
  StopCondition stop;
  stop.radius = radius;
  const auto run = explore_planar(PlanarVariant::cubic, 5, t, ClockField(seed), stop, true);
  REQUIRE(run.trace.has_value());
  return *run.trace;
}

// First seed whose origin opens, so that the trace has boundary edges.
PlanarTrace traced_run_with_bounds(double t, int radius = 30) {
  for (std::uint64_t seed = 1;; ++seed) {
    PlanarTrace trace = traced_run(t, seed, radius);
    if (trace.steps.size() > 3) return trace;
  }
}

// Rewrites the first boundary-add event of the text into a lower bound.
std::string corrupt_first_bound(const std::string& text, std::uint64_t& step) {
  std::string out = text;
  const auto pos = out.find("B+:");
  REQUIRE(pos != std::string::npos);
  const auto rel = out.find("<=", pos);
  out.replace(rel, 2, ">=");
  const auto line_start = out.rfind('\n', pos) + 1;
  step = std::stoull(out.substr(line_start, out.find('\t', line_start) - line_start));
  return out;
}

}  // namespace

TEST_SUITE("trace") {
  TEST_CASE("completed runs decouple") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto report = check_decoupling(traced_run(0.62, seed));
      CAPTURE(seed);
      CHECK(report.ok);
      CHECK(report.violations.empty());
    }
  }

  TEST_CASE("bounds at t = 1 are the rescue maxima and never exceed t") {
    const PlanarTrace trace = traced_run_with_bounds(1.0, 10);
    CHECK(check_decoupling(trace).ok);
    bool saw_bound = false;
    for (const auto& step : trace.steps)
      for (const auto& ev : step.events)
        if (ev.kind == TraceEvent::Kind::boundary_add) {
          saw_bound = true;
          CHECK(ev.relation == "<=");
          CHECK(ev.value <= 1.0);
          CHECK(step.decision == "open:rescued");
        }
    CHECK(saw_bound);
  }

  TEST_CASE("text round-trip") {
    const PlanarTrace trace = traced_run(0.62, 4, 12);
    const std::string text = format_trace(trace);
    const PlanarTrace back = parse_trace_text(text);
    CHECK(back.kappa == trace.kappa);
    CHECK(back.t == trace.t);
    REQUIRE(back.steps.size() == trace.steps.size());
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      CHECK(back.steps[i].vertex == trace.steps[i].vertex);
      CHECK(back.steps[i].decision == trace.steps[i].decision);
      REQUIRE(back.steps[i].events.size() == trace.steps[i].events.size());
      for (std::size_t j = 0; j < trace.steps[i].events.size(); ++j) {
        CHECK(back.steps[i].events[j].edge == trace.steps[i].events[j].edge);
        CHECK(back.steps[i].events[j].value == trace.steps[i].events[j].value);
      }
    }
    CHECK(format_trace(back) == text);
  }

  TEST_CASE("a boundary edge marked with a lower bound is caught at its step") {
    const std::string text = format_trace(traced_run_with_bounds(0.62));
    std::uint64_t step = 0;
    const PlanarTrace bad = parse_trace_text(corrupt_first_bound(text, step));
    const auto report = check_decoupling(bad);
    CHECK_FALSE(report.ok);
    REQUIRE(report.first_violation_step.has_value());
    CHECK(*report.first_violation_step == step);
  }

  TEST_CASE("other corruptions are caught") {
    PlanarTrace trace = traced_run_with_bounds(0.62);
    REQUIRE(trace.steps.size() > 3);
    SUBCASE("bound above t") {
      for (auto& step : trace.steps)
        for (auto& ev : step.events)
          if (ev.kind == TraceEvent::Kind::boundary_add) ev.value = 0.9;
      CHECK_FALSE(check_decoupling(trace).ok);
    }
    SUBCASE("vertex treated twice") {
      trace.steps.push_back(trace.steps.front());
      CHECK_FALSE(check_decoupling(trace).ok);
    }
    SUBCASE("feasibility revealed on a spoilt edge") {
      TraceStep& first = trace.steps.front();
      for (const auto& ev : first.events)
        if (ev.kind == TraceEvent::Kind::spoil) {
          first.events.push_back({TraceEvent::Kind::feasibility, ev.edge, "=", 1.0});
          break;
        }
      CHECK_FALSE(check_decoupling(trace).ok);
    }
    SUBCASE("an edge left untreated") {
      auto& events = trace.steps.front().events;
      for (auto it = events.begin(); it != events.end(); ++it)
        if (it->kind == TraceEvent::Kind::spoil) {
          events.erase(it);
          break;
        }
      CHECK_FALSE(check_decoupling(trace).ok);
    }
  }

  TEST_CASE("malformed text is rejected") {
    CHECK_THROWS_AS(parse_trace_text("garbage"), std::invalid_argument);
    CHECK_THROWS_AS(parse_trace_text("# variant=cubic kappa=5 t=0.62\n0\t0,0\tmaybe\t\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_trace_text("# variant=cubic kappa=5 t=0.62\n0\t0,0\topen:unsaturated\tQ:x\n"),
                    std::invalid_argument);
  }
}
