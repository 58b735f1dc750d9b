#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "cdp/exploration.hpp"
#include "cdp/rng.hpp"

using namespace cdp;

namespace {

bool within_sigma(const TallyCounts& c, double p, double k) {
  const double n = static_cast<double>(c.trials);
  const double freq = static_cast<double>(c.successes) / n;
  return std::abs(freq - p) <= k * std::sqrt(p * (1 - p) / n);
}

}  // namespace

TEST_SUITE("exploration") {
  TEST_CASE("general: nothing feasible at t = 0") {
    const auto map = ProjectionMap::standard(4, 2);
    const auto run = explore_general(4, 4, 0.0, map, ClockField(1));
    CHECK(run.outcome == Outcome::died);
    CHECK(run.state.open == 1);
    CHECK(run.tally.get("activate").successes == 0);
  }

  TEST_CASE("general: unconstrained at t = 1 fills the target window") {
    const auto map = ProjectionMap::standard(4, 2);
    StopCondition stop;
    stop.max_open = 1'000'000;
    stop.radius = 6;
    const auto run = explore_general(4, 8, 1.0, map, ClockField(1), stop);
    CHECK(run.outcome == Outcome::survived);
    CHECK(run.state.closed == 0);
    const auto act = run.tally.get("activate");
    CHECK(act.trials > 0);
    CHECK(act.successes == act.trials);
    CHECK(run.state.max_image_radius() >= 6);
  }

  TEST_CASE("general: rejects bad parameters") {
    const auto map = ProjectionMap::standard(4, 2);
    CHECK_THROWS_AS(explore_general(4, 0, 0.5, map, ClockField(1)), std::invalid_argument);
    CHECK_THROWS_AS(explore_general(4, 4, 1.5, map, ClockField(1)), std::invalid_argument);
    CHECK_THROWS_AS(explore_general(5, 4, 0.5, map, ClockField(1)), std::invalid_argument);
  }

  TEST_CASE("general: replay finds every open vertex in the cluster") {
    const auto map = ProjectionMap::standard(10, 2);
    StopCondition stop;
    stop.max_open = 500;
    for (std::uint64_t i = 0; i < 10; ++i) {
      const ClockField clocks(derive_seed(77, i));
      const auto run = explore_general(10, 10, 0.17, map, clocks, stop);
      const auto report = verify_general_soundness(run, 10, 10, 0.17, clocks);
      CHECK(report.ok());
      CHECK(report.checked_vertices == run.state.open);
    }
  }

  TEST_CASE("general: open vertices have at most kappa feasible edges") {
    const auto map = ProjectionMap::standard(6, 3);
    const auto run = explore_general(6, 6, 0.3, map, ClockField(8));
    for (const auto& v : run.state.active) {
      if (v.status == GeneralStatus::open) CHECK(v.feasible_edges <= 6);
      if (v.status == GeneralStatus::closed) CHECK(v.feasible_edges > 6);
    }
  }

  TEST_CASE("general: same seed, same run") {
    const auto map = ProjectionMap::standard(10, 2);
    const auto a = explore_general(10, 10, 0.17, map, ClockField(5));
    const auto b = explore_general(10, 10, 0.17, map, ClockField(5));
    CHECK(a.state.open == b.state.open);
    CHECK(a.tally.get("activate").successes == b.tally.get("activate").successes);
  }

  TEST_CASE("planar: nothing feasible at t = 0") {
    const auto run = explore_planar(PlanarVariant::cubic, 5, 0.0, ClockField(3));
    CHECK(run.outcome == Outcome::died);
    CHECK(run.state.open == 1);
    CHECK(run.state.active.size() == 1);
    CHECK(run.state.boundary.empty());
  }

  TEST_CASE("planar: rescue probabilities at t = 1") {
    // With all clocks i.i.d. and b(a) present, the maximum of the 3 + |X|
    // compared clocks is one of the two out-of-plane edges w.p. 2/(3+|X|).
    DominanceTally tally;
    for (std::uint64_t i = 0; i < 400; ++i) {
      StopCondition stop;
      stop.max_open = 200;
      tally.merge(explore_planar(PlanarVariant::cubic, 5, 1.0, ClockField(derive_seed(21, i)), stop).tally);
    }
    CHECK(within_sigma(tally.get("rescue:origin"), 1.0 / 3, 4));
    for (int x = 1; x <= 3; ++x) {
      const auto c = tally.get("rescue:X=" + std::to_string(x));
      CAPTURE(x);
      REQUIRE(c.trials > 500);
      CHECK(within_sigma(c, 2.0 / (3 + x), 4));
    }
    // Every non-origin vertex at t = 1 is saturated, so activation only
    // happens through a rescue.
    const auto a1 = tally.get("X=1:N>=1");
    CHECK(a1.trials == tally.get("rescue:X=1").trials);
    CHECK(a1.successes == tally.get("rescue:X=1").successes);
  }

  TEST_CASE("planar: matching-square runs and stops") {
    StopCondition stop;
    stop.radius = 8;
    const auto run = explore_planar(PlanarVariant::matching_square, 7, 0.62, ClockField(4), stop);
    CHECK(run.state.open >= 1);
    CHECK(run.state.max_radius() <= 8);
    CHECK(PlanarGeometry{PlanarVariant::matching_square}.incident({0, 0}).size() == 8);
    CHECK(PlanarGeometry{PlanarVariant::cubic}.incident({0, 0}).size() == 6);
  }

  TEST_CASE("planar: boundary edges carry bounds no larger than t") {
    const auto run = explore_planar(PlanarVariant::cubic, 5, 0.62, ClockField(12));
    for (const auto& [e, bound] : run.state.boundary) CHECK(bound <= 0.62);
    for (const auto& [e, u] : run.state.spoilt) CHECK(run.state.boundary.count(e) == 0);
  }

  TEST_CASE("planar: replay finds every open vertex in the cluster") {
    StopCondition stop;
    stop.radius = 9;
    for (auto variant : {PlanarVariant::cubic, PlanarVariant::matching_square}) {
      for (std::uint64_t i = 0; i < 20; ++i) {
        const ClockField clocks(derive_seed(31, i));
        const int kappa = variant == PlanarVariant::cubic ? 5 : 7;
        const auto run = explore_planar(variant, kappa, 0.62, clocks, stop);
        const auto report = verify_planar_soundness(run, kappa, 0.62, clocks, 10);
        CHECK(report.ok());
      }
    }
  }

  TEST_CASE("planar: replay window must cover the explored region") {
    StopCondition stop;
    stop.radius = 9;
    const ClockField clocks(1);
    const auto run = explore_planar(PlanarVariant::cubic, 5, 0.9, clocks, stop);
    REQUIRE(run.state.max_radius() >= 5);
    CHECK_THROWS_AS(verify_planar_soundness(run, 5, 0.9, clocks, run.state.max_radius()), std::invalid_argument);
  }

  TEST_CASE("planar variants parse") {
    CHECK(parse_planar_variant("cubic") == PlanarVariant::cubic);
    CHECK(parse_planar_variant("matching-square") == PlanarVariant::matching_square);
    CHECK(to_string(PlanarVariant::matching_square) == "matching-square");
    CHECK_THROWS_AS(parse_planar_variant("hexagonal"), std::invalid_argument);
  }

  TEST_CASE("general: projection is injective on the active set") {
    const auto map = ProjectionMap::standard(10, 2);
    for (std::uint64_t i = 0; i < 5; ++i) {
      const auto run = explore_general(10, 10, 0.17, map, ClockField(derive_seed(3, i)));
      std::set<Vertex> images;
      for (const auto& v : run.state.active) {
        CHECK(map.project(v.position) == v.image);
        images.insert(v.image);
      }
      CHECK(images.size() == run.state.active.size());
    }
  }

  TEST_CASE("termination duality") {
    const auto map = ProjectionMap::standard(10, 2);
    StopCondition stop;
    stop.max_open = 2000;
    stop.radius = 30;
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto g = explore_general(10, 10, 0.17, map, ClockField(derive_seed(4, i)), stop);
      const bool reached = g.state.open >= stop.max_open || g.state.max_image_radius() >= stop.radius;
      CHECK((g.outcome == Outcome::survived) == reached);
      if (g.outcome == Outcome::died) CHECK(g.state.untreated.empty());
      const auto p = explore_planar(PlanarVariant::cubic, 5, 0.62, ClockField(derive_seed(4, i)), stop);
      const bool p_reached = p.state.open >= stop.max_open || p.state.max_radius() >= stop.radius;
      CHECK((p.outcome == Outcome::survived) == p_reached);
      if (p.outcome == Outcome::died) CHECK(p.state.untreated.empty());
    }
  }
}
