#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "treegrade/treegraded.hpp"
#include "util.hpp"

using namespace tg;
using namespace tg::testing;

namespace {

rbp_structure make_structure(metric_graph g, std::vector<point_set> pieces, long long m,
                             int base = 0) {
  rbp_structure s;
  s.graph = std::move(g);
  s.decomposition.pieces = std::move(pieces);
  s.decomposition.base_piece = base;
  s.m = m;
  return s;
}

point_set range_set(vertex_id from, vertex_id to) {
  std::vector<vertex_id> v;
  for (vertex_id x = from; x <= to; ++x) v.push_back(x);
  return point_set(v);
}

// Path 0..8 split at 4; the base piece holds vertex 0.
rbp_structure split_path() {
  return make_structure(path_graph(9), {range_set(0, 4), range_set(4, 8)}, 1);
}

// Same depth-two tree of path pieces as the construction tests: base path
// 0..8, 20-vertex arms off each end, 10-vertex tips off each arm.
struct armed_instance {
  rbp_structure structure;
  int base = 0, left_arm = 1, left_tip = 2, right_arm = 3, right_tip = 4;
};

armed_instance two_armed_tree() {
  std::vector<std::pair<vertex_id, vertex_id>> edges;
  for (vertex_id v = 0; v < 8; ++v) edges.emplace_back(v, v + 1);
  edges.emplace_back(0, 9);
  for (vertex_id v = 9; v < 28; ++v) edges.emplace_back(v, v + 1);
  edges.emplace_back(28, 29);
  for (vertex_id v = 29; v < 38; ++v) edges.emplace_back(v, v + 1);
  edges.emplace_back(8, 39);
  for (vertex_id v = 39; v < 58; ++v) edges.emplace_back(v, v + 1);
  edges.emplace_back(58, 59);
  for (vertex_id v = 59; v < 68; ++v) edges.emplace_back(v, v + 1);

  piece_decomposition dec;
  dec.pieces = {range_set(0, 8), range_set(9, 28).set_or(single(0)),
                range_set(29, 38).set_or(single(28)), range_set(39, 58).set_or(single(8)),
                range_set(59, 68).set_or(single(58))};
  dec.base_piece = 0;
  armed_instance out;
  out.structure = tree_graded_certificate(metric_graph(69, edges), dec);
  return out;
}

tree_graded_space armed_space(construction_state& st_out) {
  armed_instance inst = two_armed_tree();
  st_out = build_construction(inst.structure, 4, 20);
  return build_tree_graded(st_out);
}

// True when {a, b} is the only connection between its two sides.
bool edge_is_bridge(const metric_graph& g, vertex_id a, vertex_id b) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<vertex_id> stack{a};
  seen[a] = 1;
  while (!stack.empty()) {
    const vertex_id u = stack.back();
    stack.pop_back();
    for (vertex_id w : g.neighbors(u)) {
      if ((u == a && w == b) || (u == b && w == a)) continue;
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return !seen[b];
}

}  // namespace

TEST_CASE("treegraded: split path realizes two copies joined by one arc") {
  rbp_structure s = split_path();
  construction_state st = build_construction(s, 0);
  tree_graded_space t = build_tree_graded(st);

  // Both neighborhoods swallow the whole path, so the copies are full.
  CHECK(t.hulls[0] == range_set(0, 8));
  CHECK(t.hulls[1] == range_set(0, 8));
  CHECK(t.copy_base == std::vector<vertex_id>{0, 9});
  CHECK(t.realized.vertex_count() == 21);

  REQUIRE(t.arcs.size() == 1);
  const arc_info& arc = t.arcs[0];
  CHECK(arc.piece == 1);
  CHECK(arc.child_attach == 4);
  CHECK(arc.parent_attach == 0);
  CHECK(arc.length == 4);
  CHECK(arc.from == t.copy_vertex(1, 4));
  CHECK(arc.to == t.copy_vertex(0, 0));
  CHECK(arc.route() == std::vector<vertex_id>{13, 18, 19, 20, 0});
  CHECK(arc.length ==
        oracles::oracle_distances(s.graph, arc.child_attach)[arc.parent_attach]);

  CHECK(t.underlying_tree.vertex_count() == 2);
  CHECK(t.underlying_tree.edge_count() == 1);
  CHECK(t.depth == std::vector<int>{0, 1});

  for (vertex_id v = 0; v < t.realized.vertex_count(); ++v)
    CHECK(t.resolve(t.locate(v)) == v);
}

TEST_CASE("treegraded: a single piece realizes as its own neighborhood") {
  rbp_structure s = make_structure(cycle_graph(6), {range_set(0, 5)}, 1);
  construction_state st = build_construction(s, 2);
  tree_graded_space t = build_tree_graded(st);

  CHECK(t.realized.vertex_count() == 6);
  CHECK(t.arcs.empty());
  CHECK(t.underlying_tree.vertex_count() == 1);
  CHECK(t.underlying_tree.edge_count() == 0);
  CHECK(verify_tree_graded(t).passed);

  distortion_report report = measure_distortion(t, st, sample_spec::all());
  CHECK(report.max_excess == 0);
  CHECK(report.pairs_checked == 15);
}

TEST_CASE("treegraded: level one arcs land in the base copy, forming a star") {
  construction_state st;
  tree_graded_space t = armed_space(st);

  CHECK(t.underlying_tree.vertex_count() == 5);
  CHECK(t.underlying_tree.edge_count() == 4);
  CHECK(t.underlying_tree.has_edge(0, 1));
  CHECK(t.underlying_tree.has_edge(0, 3));
  CHECK(t.underlying_tree.has_edge(1, 2));
  CHECK(t.underlying_tree.has_edge(3, 4));
  CHECK(t.depth == std::vector<int>{0, 1, 2, 1, 2});

  // Both level-one arcs glue into the copy of the base piece.
  for (int arm : {1, 3}) {
    const arc_info& arc = t.arcs[t.arc_of_piece[arm]];
    CHECK(t.copy_sets[0].contains(arc.to));
    CHECK(arc.length ==
          oracles::oracle_distances(st.structure.graph, arc.child_attach)[arc.parent_attach]);
  }
}

TEST_CASE("treegraded: oracle distances equal realized shortest paths") {
  construction_state st;
  tree_graded_space t = armed_space(st);
  transit_oracle oracle(t);

  for (vertex_id u = 0; u < t.realized.vertex_count(); ++u) {
    const std::vector<int> row = oracles::oracle_distances(t.realized, u);
    for (vertex_id v = u; v < t.realized.vertex_count(); ++v)
      CHECK(oracle.distance(t.locate(u), t.locate(v)) == row[v]);
  }
}

TEST_CASE("treegraded: point queries cover copies, arc interiors and attach points") {
  rbp_structure s = split_path();
  construction_state st = build_construction(s, 0);
  tree_graded_space t = build_tree_graded(st);

  CHECK(tg_distance(t, tg_point::on_piece(0, 0), tg_point::on_piece(0, 8)) == 8);
  CHECK(tg_distance(t, tg_point::on_piece(1, 4), tg_point::on_piece(0, 0)) == 4);
  CHECK(tg_distance(t, tg_point::on_arc(1, 0), tg_point::on_piece(1, 4)) == 0);
  CHECK(tg_distance(t, tg_point::on_arc(1, 4), tg_point::on_piece(0, 0)) == 0);
  CHECK(tg_distance(t, tg_point::on_arc(1, 1), tg_point::on_arc(1, 3)) == 2);
  CHECK(tg_distance(t, tg_point::on_arc(1, 2), tg_point::on_piece(0, 0)) == 2);
  CHECK(tg_distance(t, tg_point::on_arc(1, 2), tg_point::on_piece(1, 4)) == 2);
  // The two copies of the source basepoint sit a full round trip apart.
  CHECK(tg_distance(t, tg_point::on_piece(1, 0), tg_point::on_piece(0, 0)) == 8);

  CHECK(raises([&] { t.resolve(tg_point::on_arc(0, 1)); }, errc::invalid_argument));
  CHECK(raises([&] { t.resolve(tg_point::on_arc(1, 5)); }, errc::invalid_argument));
  CHECK(raises([&] { t.locate(21); }, errc::invalid_argument));
  CHECK(raises([&] { t.copy_vertex(0, 99); }, errc::invalid_argument));
  CHECK(raises([&] { tg_distance(t, tg_point::on_arc(1, -1), tg_point::on_piece(0, 0)); },
               errc::invalid_argument));
}

TEST_CASE("treegraded: split path distortion peaks at the doubled far vertex") {
  rbp_structure s = split_path();
  construction_state st = build_construction(s, 0);
  tree_graded_space t = build_tree_graded(st);

  distortion_report report = measure_distortion(t, st, sample_spec::all());
  CHECK(report.pairs_checked == 210);
  CHECK(report.additive_bound == 3552);
  CHECK(report.bound_satisfied);
  CHECK(report.max_lipschitz_violation == 0);
  // Both neighborhoods cover the whole path, so vertex 8 is doubled and its
  // two copies sit a full round trip apart: 8 through the base copy, 4
  // along the arc and 4 more to the far copy, collapsing to distance 0.
  CHECK(report.max_excess == 16);
  CHECK(report.excess_histogram.at(0) > 0);
  CHECK(report.excess_histogram.at(8) > 0);
  CHECK(report.excess_histogram.at(16) > 0);
}

TEST_CASE("treegraded: distortion bound holds across the armed tree") {
  construction_state st;
  tree_graded_space t = armed_space(st);

  distortion_report report = measure_distortion(t, st, sample_spec::all());
  CHECK(report.bound_satisfied);
  CHECK(report.max_lipschitz_violation == 0);
  CHECK(report.additive_bound == 18 * 20 + 672 * 2);
  // Overlapping neighborhoods land in different copies, so some excess is
  // unavoidable, but it stays far below the additive bound.
  CHECK(report.max_excess >= 1);
  CHECK(report.max_excess <= report.additive_bound / 4);
}

TEST_CASE("treegraded: arcs are bridges of the realized graph") {
  construction_state st;
  tree_graded_space t = armed_space(st);
  for (const arc_info& arc : t.arcs) {
    const std::vector<vertex_id> route = arc.route();
    for (std::size_t k = 0; k + 1 < route.size(); ++k)
      CHECK(edge_is_bridge(t.realized, route[k], route[k + 1]));
  }
}

TEST_CASE("treegraded: verification accepts built spaces") {
  rbp_structure s = split_path();
  construction_state st = build_construction(s, 0);
  CHECK(verify_tree_graded(build_tree_graded(st)).passed);

  construction_state armed_st;
  tree_graded_space t = armed_space(armed_st);
  tree_graded_report report = verify_tree_graded(t);
  CHECK(report.passed);
  CHECK(report.single_point_gluing);
  CHECK(report.underlying_acyclic);
  CHECK(report.cycles_in_pieces);
  CHECK(report.detail.empty());
}

TEST_CASE("treegraded: verification flags hand-built degenerate spaces") {
  SUBCASE("two copies sharing two vertices") {
    tree_graded_space t;
    t.realized = path_graph(4);
    t.copy_sets = {range_set(0, 2), range_set(1, 3)};
    t.underlying_tree = metric_graph(2, {{0, 1}});
    tree_graded_report report = verify_tree_graded(t);
    CHECK_FALSE(report.passed);
    CHECK_FALSE(report.single_point_gluing);
    CHECK(report.underlying_acyclic);
    CHECK(report.cycles_in_pieces);
    CHECK_FALSE(report.detail.empty());
  }
  SUBCASE("a cycle running through two arcs") {
    tree_graded_space t;
    t.realized = cycle_graph(4);
    t.copy_sets = {range_set(0, 1), range_set(2, 3)};
    arc_info forward;
    forward.piece = 1;
    forward.from = 1;
    forward.to = 2;
    forward.length = 1;
    arc_info backward;
    backward.piece = 1;
    backward.from = 3;
    backward.to = 0;
    backward.length = 1;
    t.arcs = {forward, backward};
    t.underlying_tree = metric_graph(2, {{0, 1}});
    tree_graded_report report = verify_tree_graded(t);
    CHECK_FALSE(report.passed);
    CHECK(report.single_point_gluing);
    CHECK(report.underlying_acyclic);
    CHECK_FALSE(report.cycles_in_pieces);
  }
  SUBCASE("a looped underlying tree") {
    tree_graded_space t;
    t.realized = path_graph(3);
    t.copy_sets = {single(0), single(1), single(2)};
    t.underlying_tree = metric_graph(3, {{0, 1}, {1, 2}, {0, 2}});
    tree_graded_report report = verify_tree_graded(t);
    CHECK_FALSE(report.passed);
    CHECK_FALSE(report.underlying_acyclic);
    CHECK(report.single_point_gluing);
    CHECK(report.cycles_in_pieces);
  }
}

TEST_CASE("treegraded: collapse maps copies to originals and arcs along geodesics") {
  rbp_structure s = split_path();
  construction_state st = build_construction(s, 0);
  tree_graded_space t = build_tree_graded(st);
  collapse_map phi = collapse(t, st);

  for (vertex_id v = 0; v <= 8; ++v) {
    CHECK(phi.image[t.copy_vertex(0, v)] == v);
    CHECK(phi.image[t.copy_vertex(1, v)] == v);
  }
  // Interior arc vertices walk the geodesic 4 -> 0.
  CHECK(phi.image[18] == 3);
  CHECK(phi.image[19] == 2);
  CHECK(phi.image[20] == 1);

  SUBCASE("collapse is onto the source graph") {
    construction_state armed_st;
    tree_graded_space armed = armed_space(armed_st);
    collapse_map onto = collapse(armed, armed_st);
    std::vector<vertex_id> hit = onto.image;
    std::sort(hit.begin(), hit.end());
    hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
    CHECK(static_cast<vertex_id>(hit.size()) == armed_st.structure.graph.vertex_count());
    CHECK(hit.front() == 0);
    CHECK(hit.back() == armed_st.structure.graph.vertex_count() - 1);
  }
  SUBCASE("a doctored geodesic breaks the Lipschitz check") {
    construction_state bad = st;
    bad.geodesics[1].vertices = {4, 5, 6, 7, 8};
    CHECK(raises([&] { collapse(t, bad); }, errc::lipschitz_violation));
    bad.geodesics[1].vertices = {4, 3, 2};
    CHECK(raises([&] { collapse(t, bad); }, errc::lipschitz_violation));
  }
}

TEST_CASE("treegraded: the realized space re-verifies at the canonical scale") {
  construction_state st;
  tree_graded_space t = armed_space(st);

  piece_decomposition dec;
  dec.pieces = t.copy_sets;
  for (const arc_info& arc : t.arcs) dec.pieces.emplace_back(arc.route());
  dec.base_piece = 0;
  rbp_structure round_trip = tree_graded_certificate(t.realized, dec);
  CHECK(round_trip.m == 2);
  verification_report report = verify_rbp(round_trip, sample_spec::all());
  CHECK(report.all_verified);
  CHECK(report.refuted_count == 0);
  CHECK(report.unknown_count == 0);
}

TEST_CASE("treegraded: doctored construction states fail the build") {
  SUBCASE("a parent loop never reaches the base") {
    rbp_structure s = split_path();
    construction_state st = build_construction(s, 0);
    st.parents[1] = 1;
    CHECK(raises([&] { build_tree_graded(st); }, errc::parent_cycle));
  }
  SUBCASE("a parent outside the index range") {
    rbp_structure s = split_path();
    construction_state st = build_construction(s, 0);
    st.parents[1] = 99;
    CHECK(raises([&] { build_tree_graded(st); }, errc::invalid_argument));
  }
  SUBCASE("a level pushed past the geodesic kills the arc length") {
    rbp_structure s = split_path();
    construction_state st = build_construction(s, 0);
    st.levels[1] = 5;
    CHECK(raises([&] { build_tree_graded(st); }, errc::invalid_argument));
  }
  SUBCASE("a disconnected neighborhood is rejected") {
    rbp_structure s =
        make_structure(path_graph(21), {range_set(0, 10), range_set(10, 20)}, 1);
    construction_state st = build_construction(s, 0);
    st.structure.decomposition.pieces[1] = point_set({10, 20});
    CHECK(raises([&] { build_tree_graded(st); }, errc::piece_disconnected));
  }
  SUBCASE("a displaced attach point violates glue containment") {
    armed_instance inst = two_armed_tree();
    construction_state st = build_construction(inst.structure, 4, 20);
    st.c_points[inst.left_tip] = 38;
    CHECK(raises([&] { build_tree_graded(st); }, errc::glue_violated));
  }
  SUBCASE("a zeroed bound trips the distortion assertion") {
    rbp_structure s = split_path();
    construction_state st = build_construction(s, 0);
    tree_graded_space t = build_tree_graded(st);
    construction_state doctored = st;
    doctored.r = 0;
    doctored.structure.m = 0;
    CHECK(raises([&] { measure_distortion(t, doctored, sample_spec::all()); },
                 errc::bound_violated));
  }
}

TEST_CASE("treegraded: builds and reports are deterministic") {
  construction_state st_a;
  tree_graded_space a = armed_space(st_a);
  construction_state st_b;
  tree_graded_space b = armed_space(st_b);

  CHECK(a.realized.edges() == b.realized.edges());
  CHECK(a.copy_base == b.copy_base);
  CHECK(a.arc_of_piece == b.arc_of_piece);
  REQUIRE(a.arcs.size() == b.arcs.size());
  for (std::size_t k = 0; k < a.arcs.size(); ++k) {
    CHECK(a.arcs[k].route() == b.arcs[k].route());
    CHECK(a.arcs[k].length == b.arcs[k].length);
  }

  distortion_report ra = measure_distortion(a, st_a, sample_spec::all());
  distortion_report rb = measure_distortion(b, st_b, sample_spec::all());
  CHECK(ra.pairs_checked == rb.pairs_checked);
  CHECK(ra.max_excess == rb.max_excess);
  CHECK(ra.excess_histogram == rb.excess_histogram);
}
