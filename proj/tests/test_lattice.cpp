#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "cdp/graph.hpp"
#include "cdp/lattice.hpp"

using namespace cdp;

namespace {

Vertex unit(int d, int j, int sign = 1) {
  Vertex v(d, 0);
  v[j] = sign;
  return v;
}

// Every vertex of the window in lexicographic order.
std::vector<Vertex> all_vertices(const LatticeSpec& spec) {
  std::vector<Vertex> out;
  Vertex v(spec.dim, -spec.radius);
  while (true) {
    out.push_back(v);
    int j = spec.dim - 1;
    while (j >= 0 && v[j] == spec.radius) v[j--] = -spec.radius;
    if (j < 0) break;
    ++v[j];
  }
  return out;
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("neighbour counts") {
    CHECK(neighbors(LatticeSpec::hypercubic(3, Boundary::torus, 2), Vertex{1, -2, 0}).size() == 6);
    CHECK(neighbors(LatticeSpec::matching_square(Boundary::torus, 3), Vertex{3, 3}).size() == 8);
    CHECK(neighbors(LatticeSpec::hypercubic(2, Boundary::free_box, 1), Vertex{1, 1}).size() == 2);
    CHECK(neighbors(LatticeSpec::matching_square(Boundary::free_box, 1), Vertex{1, 1}).size() == 3);
    CHECK_THROWS_AS(neighbors(LatticeSpec::hypercubic(2, Boundary::free_box, 1), Vertex{2, 0}), std::out_of_range);
  }

  TEST_CASE("spec parsing and validation") {
    const auto s = LatticeSpec::parse("hypercubic:3", "free-box", 4);
    CHECK(s.dim == 3);
    CHECK(s.boundary == Boundary::free_box);
    CHECK(LatticeSpec::parse("matching-square", "torus", 2).degree() == 8);
    CHECK_THROWS_AS(LatticeSpec::parse("hexagonal", "torus", 2), std::invalid_argument);
    CHECK_THROWS_AS(LatticeSpec::parse("hypercubic:2", "sphere", 2), std::invalid_argument);
    CHECK_THROWS_AS(LatticeSpec::parse("hypercubic:2", "torus", 0), std::invalid_argument);
  }

  TEST_CASE("projection of single coordinates") {
    const ProjectionMap map(4, {{0, 1}, {2, 3}});
    CHECK(map.project(Vertex{0, 0, 0, 0}) == Vertex{0, 0});
    CHECK(map.project(unit(4, 0)) == Vertex{1, 0});
    CHECK(map.project(unit(4, 2, -1)) == Vertex{0, -1});
    CHECK(map.project(Vertex{1, 2, -3, 1}) == Vertex{3, -2});
  }

  TEST_CASE("fibre edges follow the groups in ascending order") {
    const Vertex o(4, 0);
    const auto east = ProjectionMap::standard(4, 2).fiber_edges(o, Vertex{1, 0});
    REQUIRE(east.size() == 2);
    CHECK(head_of(LatticeKind::hypercubic, east[0]) == unit(4, 0));
    CHECK(head_of(LatticeKind::hypercubic, east[1]) == unit(4, 1));

    const Vertex o6(6, 0);
    const auto south = ProjectionMap::standard(6, 2).fiber_edges(o6, Vertex{0, -1});
    REQUIRE(south.size() == 3);
    for (int j = 0; j < 3; ++j) CHECK(south[j] == edge_towards(LatticeKind::hypercubic, o6, 3 + j, -1));

    const ProjectionMap three = ProjectionMap::standard(6, 3);
    for (int dir = 0; dir < three.num_target_directions(); ++dir) CHECK(three.fiber_edges(o6, dir).size() == 2);
    CHECK_THROWS_AS(ProjectionMap::standard(4, 2).fiber_edges(o, Vertex{1, 1}), std::invalid_argument);
  }

  TEST_CASE("odd dimension leaves the middle coordinate unassigned") {
    const ProjectionMap map = ProjectionMap::standard(5, 2);
    CHECK(map.group_size() == 2);
    CHECK(map.group_of(2) == -1);
    CHECK(map.project(unit(5, 2)) == Vertex{0, 0});
  }

  TEST_CASE("invalid projections are rejected") {
    CHECK_THROWS_AS(ProjectionMap(4, {{0, 1}, {1, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(ProjectionMap(4, {{0}, {2, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(ProjectionMap::standard(2, 3), std::invalid_argument);
  }

  TEST_CASE("edge ids round-trip exhaustively") {
    std::vector<LatticeSpec> specs;
    for (auto b : {Boundary::free_box, Boundary::torus}) {
      for (int d = 1; d <= 3; ++d)
        for (int r = 1; r <= 4; ++r) specs.push_back(LatticeSpec::hypercubic(d, b, r));
      for (int d = 4; d <= 6; ++d)
        for (int r = 1; r <= (d == 4 ? 2 : 1); ++r) specs.push_back(LatticeSpec::hypercubic(d, b, r));
      for (int r = 1; r <= 4; ++r) specs.push_back(LatticeSpec::matching_square(b, r));
    }
    for (const auto& spec : specs) {
      CAPTURE(spec.to_string());
      const LatticeWindow w = build_window(spec);
      std::set<EdgeId> ids;
      std::size_t incidences = 0;
      bool ok = true;
      for (const auto& v : all_vertices(spec)) {
        for (const auto& nb : neighbors(spec, v)) {
          ++incidences;
          ids.insert(nb.edge);
          const auto [a, b] = endpoints(spec, nb.edge);
          ok = ok && ((a == v && b == nb.vertex) || (a == nb.vertex && b == v));
          ok = ok && parse_edge_id(to_string(nb.edge)) == nb.edge;
          ok = ok && w.edge_ids.at(w.edge_index(nb.edge)) == nb.edge;
        }
      }
      CHECK(ok);
      // Each edge is seen from both endpoints.
      CHECK(incidences == 2 * ids.size());
      CHECK(ids.size() == w.edge_ids.size());
      for (int i = 0; i < w.graph.num_edges(); ++i) ok = ok && w.edge_index(w.edge_ids[i]) == i;
      CHECK(ok);
    }
  }

  TEST_CASE("torus edge counts") {
    const auto w = build_window(LatticeSpec::hypercubic(2, Boundary::torus, 2));
    CHECK(w.graph.num_vertices() == 25);
    CHECK(w.graph.num_edges() == 50);
    const auto m = build_window(LatticeSpec::matching_square(Boundary::torus, 2));
    CHECK(m.graph.num_edges() == 100);
    const auto f = build_window(LatticeSpec::hypercubic(2, Boundary::free_box, 1));
    CHECK(f.graph.num_edges() == 12);
    CHECK(f.vertex(f.origin) == Vertex{0, 0});
  }

  TEST_CASE("clock counters depend only on the edge") {
    const EdgeId e{{3, -1, 2}, 1};
    CHECK(edge_counter(LatticeKind::hypercubic, e) == edge_counter(LatticeKind::hypercubic, e));
    CHECK(edge_counter(LatticeKind::hypercubic, e) != edge_counter(LatticeKind::hypercubic, EdgeId{{3, -1, 2}, 2}));
    CHECK(edge_counter(LatticeKind::hypercubic, EdgeId{{0, 0}, 0}) !=
          edge_counter(LatticeKind::matching_square, EdgeId{{0, 0}, 0}));
    // Window edges share counters with the infinite lattice.
    const auto w = build_window(LatticeSpec::hypercubic(3, Boundary::free_box, 2));
    const int i = w.edge_index(EdgeId{{1, -1, 1}, 1});
    CHECK(w.graph.counter(i) == edge_counter(LatticeKind::hypercubic, w.edge_ids[i]));
  }
}
