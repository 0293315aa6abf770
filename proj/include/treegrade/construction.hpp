#pragma once
// The constructive machinery between a verified bottleneck structure and
// its tree-graded companion space: per-piece basepoints and canonical
// geodesics, radius-R strata, c-points, the per-level gluing equivalence,
// and the level-decreasing parent map.  Every lemma-shaped fact the later
// assembly relies on is checked here at runtime and recorded in a trace.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treegrade/rbp.hpp"

namespace tg {

// One recorded construction check; pass is always true for entries of an
// accepted run (failures raise instead), so the trace doubles as an audit
// log of which guarantees were actually exercised.
struct trace_entry {
  std::string check;
  bool pass = true;
  std::string detail;
};

// Everything the construction derives from a structure and a basepoint.
// Per-piece vectors are indexed by piece id; the entry for the base piece
// holds the degenerate values (basepoint e itself, trivial geodesic).
struct construction_state {
  rbp_structure structure;
  long long r = 0;      // stratum width R, a positive multiple of M
  vertex_id e = -1;     // global basepoint vertex
  int e_piece = -1;     // the unique piece containing e
  std::vector<int> dist_e;  // d(e, .) over the whole graph

  std::vector<vertex_id> basepoints;      // e_i
  std::vector<bottleneck_chain> chains;   // the i -> e chain whose w_0 = e_i
  std::vector<path_witness> geodesics;    // g_i, runs e_i -> e
  std::vector<int> levels;                // lv(i); 0 exactly for the base piece
  std::vector<std::vector<int>> strata;   // strata[L] = pieces at level L, ascending
  std::vector<vertex_id> c_points;        // c_i; equals e when lv(i) = 1
  // classes[L] partitions strata[L]; members and classes sorted ascending.
  std::vector<std::vector<std::vector<int>>> classes;
  std::vector<int> parents;  // c(i); the base piece maps to itself
  std::vector<trace_entry> trace;

  int max_level() const { return static_cast<int>(strata.size()) - 1; }
};

// Validates the structure, locates the unique piece containing e
// (BasepointNotUnique otherwise) and fixes the stratum width; r = 0 selects
// the default 160M.  Widths that are not positive multiples of M raise
// InvalidArgument.
construction_state begin_construction(const rbp_structure& s, vertex_id e, long long r = 0);

// e_i is the first witness of a verified i -> e chain; stored chains are
// used when they verify, otherwise a proximity-ordered search runs.  Each
// basepoint must satisfy d(e, e_i) <= d(e, X_i) + M (BasepointBoundViolated)
// and some verifiable chain must exist (MissingCertificate).  Also fixes
// g_i as the canonical e_i -> e geodesic.
void compute_basepoints(construction_state& st);

// lv(i) = ceil(d(e, e_i) / R); the level-0 stratum must be exactly the base
// piece (BaseStratumNotSingleton otherwise).
void compute_strata(construction_state& st);

// c_i is the vertex of g_i at distance (lv(i) - 1) R from e; in particular
// c_i = e on level 1.
void compute_c_points(construction_state& st);

// The raw gluing relation on one level: pieces i, j at level n+1 are
// related when, for some piece k of level <= n, X_j is reachable from X_i
// without leaving (V \ B(e; nR + 11M)) union (N_{4M}(X_k) inside the ball).
// Reflexive and symmetric by construction; transitivity is checked by
// level_equivalence, not here.
struct level_relation {
  std::vector<int> members;                 // pieces at this level, ascending
  std::vector<std::vector<char>> related;   // indexed by member position
};
level_relation compute_level_relation(const construction_state& st, int level);

// Partitions one level by the gluing relation.  The raw relation must
// already be transitive; a strict violation raises NotTransitive naming the
// offending triple.
std::vector<std::vector<int>> level_equivalence(const construction_state& st, int level);

// Fills classes for every level.
void compute_classes(construction_state& st);

// Chooses one parent per class: over all members i' and all chain witnesses
// w of i' lying in a strictly lower-level piece X_k with d(e, w) >= nR - M,
// take the k whose witness sits farthest from e (ties: smallest k, then
// smallest d(e, e_k)).  A class with no eligible witness falls back to the
// base piece, recorded in the trace.  Every member's c-point must land in
// N_{4M} of the chosen parent (GlueViolated otherwise).
void parent_map(construction_state& st);

// All stages in order.
construction_state build_construction(const rbp_structure& s, vertex_id e, long long r = 0);

// A near-geodesic from x to e through the basepoint of piece i: geodesic
// x -> x' (nearest piece vertex), geodesic x' -> e_i, then g_i.  Its length
// may exceed d(x, e) by at most 10M and it must stay inside N_{4M}(X_i)
// union B(e; lv(i) R); either failure raises SlackExceeded.
struct slack_geodesic_result {
  path_witness path;
  long long slack = 0;  // length minus d(x, e)
};
slack_geodesic_result slack_geodesic(const construction_state& st, vertex_id x, int i);

// Basepoint separation: for every ordered piece pair with d(e_i, e) >=
// d(e_j, e), the ball B(e_i; 4M) must meet every X_i-to-X_j path.  Returns
// the first failing pair, if any.  Quadratically many separation tests --
// intended for desk-scale audits.
std::optional<std::pair<int, int>> check_separation(const construction_state& st);

}  // namespace tg
