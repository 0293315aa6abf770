#pragma once
// Assembly of the tree-graded companion space from a construction state:
// disjoint copies of the piece neighborhoods joined by unit-edge arcs along
// the parent map, realized as one simplicial graph.  Provides a structured
// transit-walk distance oracle, the collapse map back onto the source
// graph, axiom verification, and distortion measurement against the
// aggregate bound 2 d + 18R + 672M.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "treegrade/construction.hpp"

namespace tg {

// One gluing arc: a unit-edge path of the stated length from the copy of
// the child's basepoint to the copy of its c-point inside the parent.
struct arc_info {
  int piece = -1;                   // the child piece this arc hangs from
  vertex_id child_attach = -1;      // original id of e_i (in the child hull)
  vertex_id parent_attach = -1;     // original id of c_i (in the parent hull)
  vertex_id from = -1;              // realized copy of child_attach
  vertex_id to = -1;                // realized copy of parent_attach
  long long length = 0;             // d_X(e_i, c_i), at least 1
  std::vector<vertex_id> interior;  // realized ids strictly between, child side first

  // The whole arc as realized ids, endpoints included.
  std::vector<vertex_id> route() const;
};

// A point of the assembled space: either an original vertex inside one
// piece copy, or an offset along one piece's arc (offset 0 is the child
// attach, offset = length the parent attach).
struct tg_point {
  int piece = -1;
  vertex_id vertex = -1;
  int arc_piece = -1;
  long long offset = 0;

  static tg_point on_piece(int piece, vertex_id original);
  static tg_point on_arc(int arc_piece, long long offset);
  bool operator==(const tg_point&) const = default;
};

struct tree_graded_space {
  metric_graph realized;
  metric_graph underlying_tree;  // vertex set = piece indices
  int e_piece = -1;
  std::vector<int> parents;
  std::vector<int> depth;                 // hops to the base piece
  std::vector<point_set> hulls;           // original-id N_{4M}(X_i)
  std::vector<vertex_id> copy_base;       // realized id of hull vertex k = copy_base[i] + k
  std::vector<point_set> copy_sets;       // realized-id vertex set per copy
  std::vector<metric_graph> piece_graphs; // induced hull graphs, local rank ids
  std::vector<arc_info> arcs;
  std::vector<int> arc_of_piece;          // piece -> index into arcs, -1 for the base

  int piece_count() const { return static_cast<int>(hulls.size()); }
  // Rank of an original vertex inside its hull; InvalidArgument if absent.
  int local_rank(int piece, vertex_id original) const;
  vertex_id copy_vertex(int piece, vertex_id original) const;
  vertex_id resolve(const tg_point& p) const;
  tg_point locate(vertex_id realized_id) const;
};

// Builds the space bottom-up from the base piece: every hull must induce a
// connected subgraph (PieceDisconnected) and the parent map must reach the
// base from everywhere (ParentCycle).
tree_graded_space build_tree_graded(const construction_state& st);

// Structured distance queries: walks the unique underlying-tree path
// between host pieces, summing piece-internal geodesic legs between attach
// points plus full arc lengths.  Piece-internal rows are cached, so bulk
// all-pairs scans should share one oracle.
class transit_oracle {
 public:
  explicit transit_oracle(const tree_graded_space& t) : t_(&t) {}
  long long distance(tg_point a, tg_point b);

 private:
  const std::vector<int>& piece_row(int piece, vertex_id original);
  long long copy_distance(int pa, vertex_id va, int pb, vertex_id vb);

  const tree_graded_space* t_;
  std::map<std::pair<int, vertex_id>, std::vector<int>> rows_;
};

// One-shot convenience wrapper around transit_oracle.
long long tg_distance(const tree_graded_space& t, const tg_point& a, const tg_point& b);

// Axiom verification, report-only: (a) distinct copies and arcs pairwise
// share at most one realized vertex, (b) the underlying tree is acyclic,
// (c) every fundamental cycle of the realized graph lies inside a single
// piece copy (so all arcs are bridges).
struct tree_graded_report {
  bool passed = true;
  bool single_point_gluing = true;
  bool underlying_acyclic = true;
  bool cycles_in_pieces = true;
  std::string detail;  // first offense, empty when passed
};
tree_graded_report verify_tree_graded(const tree_graded_space& t);

// The vertex map from the realized space back onto the source graph: copy
// vertices to their originals, arc vertices to successive vertices of the
// child's canonical geodesic.  Must be 1-Lipschitz edge by edge
// (LipschitzViolation otherwise).
struct collapse_map {
  std::vector<vertex_id> image;  // realized id -> source vertex
};
collapse_map collapse(const tree_graded_space& t, const construction_state& st);

// Compares realized distances against source distances through the
// collapse: d_X(phi x, phi y) <= d_T(x, y) <= 2 d_X(phi x, phi y) + 18R +
// 672M must hold on every selected pair (BoundViolated otherwise).
struct distortion_report {
  std::uint64_t pairs_checked = 0;
  long long max_excess = 0;               // max d_T - d_X over the pairs
  long long max_lipschitz_violation = 0;  // max d_X - d_T, 0 on accepted runs
  long long additive_bound = 0;           // 18R + 672M
  bool bound_satisfied = false;
  std::map<long long, std::uint64_t> excess_histogram;
};
distortion_report measure_distortion(const tree_graded_space& t, const construction_state& st,
                                     const sample_spec& pairs);

}  // namespace tg
