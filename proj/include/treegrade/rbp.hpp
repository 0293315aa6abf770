#pragma once
// The relative bottleneck property: piece decompositions, certificate
// chains and their verification, certificate search, quasi-convexity,
// quasi-isometry transport, thickening, and the certificate generator for
// tree-graded graphs.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treegrade/metric_graph.hpp"

namespace tg {

// Pieces are vertex sets that together cover the graph; base_piece indexes
// the piece the basepoint machinery grows from.
struct piece_decomposition {
  std::vector<point_set> pieces;
  int base_piece = 0;

  void validate(const metric_graph& g) const;
};

// Certificate for one ordered piece pair: indices [source = i_0, .., i_s =
// target] with witnesses w_r in X_{i_r} ∩ X_{i_{r+1}}.  The defining
// property is that each open ball B(w_r; M) meets every source-to-target
// path, each ball on its own.
struct bottleneck_chain {
  int source = 0;
  int target = 0;
  std::vector<int> piece_indices;
  std::vector<vertex_id> witnesses;

  bottleneck_chain reversed() const;
};

struct rbp_structure {
  metric_graph graph;
  piece_decomposition decomposition;
  long long m = 1;
  // Keyed by (min(i,j), max(i,j)); the stored chain runs key.first ->
  // key.second.  Blocking is symmetric, so one orientation suffices.
  std::map<std::pair<int, int>, bottleneck_chain> certificates;

  int piece_count() const { return static_cast<int>(decomposition.pieces.size()); }
  const point_set& piece(int i) const { return decomposition.pieces[i]; }
  std::optional<bottleneck_chain> chain_for(int i, int j) const;
  void store_chain(bottleneck_chain chain);
};

enum class pair_verdict { verified, refuted, unknown };
const char* pair_verdict_name(pair_verdict v);

struct pair_report {
  int i = 0;
  int j = 0;
  pair_verdict verdict = pair_verdict::unknown;
  // A verified pair is degenerate when some witness ball swallows one of
  // the two pieces whole, so that blocking holds vacuously.
  bool degenerate = false;
  std::optional<bottleneck_chain> chain;   // present when verified
  std::optional<path_witness> refutation;  // a path avoiding every candidate ball
};

struct verification_report {
  bool all_verified = false;
  long long m = 0;
  std::uint64_t verified_count = 0;
  std::uint64_t refuted_count = 0;
  std::uint64_t unknown_count = 0;
  std::vector<pair_report> pairs;
};

// Structural validation plus per-witness separation.  Malformed chains
// raise ChainMalformed; a witness whose ball fails to separate makes the
// result not ok and carries the avoiding path.
struct chain_check {
  bool ok = false;
  int failed_witness = -1;
  std::optional<path_witness> avoiding_path;
};
chain_check verify_bottleneck_chain(const rbp_structure& s, const bottleneck_chain& chain);

// Best-effort search for a certificate chain from piece i to piece j at
// scale m.  Candidate witnesses are the vertices lying in some pairwise
// piece intersection, ordered by distance from X_i; the shortest threadable
// sequence of separating candidates wins.
std::optional<bottleneck_chain> search_certificate(const rbp_structure& s, int i, int j,
                                                   long long m);

// Verifies stored chains (searching where absent) for the selected piece
// pairs.  A pair with no verifiable chain is refuted when some concrete
// path dodges the balls around every candidate witness at once, and
// unknown otherwise.
verification_report verify_rbp(const rbp_structure& s, const sample_spec& pairs,
                               int threads = 1);

// Quasi-convexity of one piece: every geodesic between points of N_c(X_i)
// must stay inside N_{2M + 2 max(M, c)}(X_i).
struct convexity_report {
  bool holds = true;
  long long radius = 0;           // neighborhood radius checked against
  vertex_id worst_offender = -1;  // geodesic vertex maximizing d(., X_i), if any escapes
  long long worst_distance = 0;
  std::uint64_t pairs_checked = 0;
};
convexity_report check_quasi_convexity(const rbp_structure& s, int piece, long long c);

// A (K, C) quasi-isometry source -> target given by its vertex image; C
// also serves as the declared co-density radius.
struct qi_map {
  long long k = 1;
  long long c = 0;
  std::vector<vertex_id> image;

  void validate(const metric_graph& source, const metric_graph& target,
                const sample_spec& pairs) const;
};

// Pushes the structure through q: pieces become N_C(q(X_i)), witnesses map
// through q, and the constant becomes K(KC + 2C + M) + C.  Every
// transported chain is re-verified; a refuted one raises TransportFailed.
rbp_structure transport_qi(const rbp_structure& s, const qi_map& q,
                           const metric_graph& target);

// Thickening: pieces fatten to closed 4M-neighborhoods, a fresh basepoint
// vertex is attached to the base piece by one edge, and each piece is
// replaced by its strong product with the path {0..2b+1}, all copies glued
// along level zero.  The output constant is 9M.
struct thicken_result {
  rbp_structure structure;
  vertex_id basepoint = -1;            // the adjoined vertex, at level zero
  std::vector<vertex_id> level_zero;   // old vertex id -> new vertex id
  int height = 0;                      // number of levels, 2b + 2
};
thicken_result thicken(const rbp_structure& s, long long b);

// Exhaustive scan: no ball with radius in [1, b] whose intersection with a
// piece has diameter <= 2b may disconnect that piece.  Thickened
// structures pass by construction; raw pieces with internal bottlenecks
// fail, and the first cutting ball is reported.
struct cut_scan_report {
  bool ok = true;
  vertex_id center = -1;
  long long radius = 0;
  int piece = -1;
  std::uint64_t balls_checked = 0;
};
cut_scan_report scan_small_cuts(const rbp_structure& s, long long b);

// Certificate generator for tree-graded graphs.  Preconditions: pieces
// pairwise share at most one vertex, each piece induces a connected
// subgraph, every edge lies inside some piece, and the piece/shared-vertex
// incidence graph is a tree (NotTreeGraded otherwise).  The result has
// pieces N_1(X_i) and constant M = 2, with chains read off the pieces met
// at integer points along a canonical geodesic between each pair.
rbp_structure tree_graded_certificate(const metric_graph& g,
                                      const piece_decomposition& pieces);

}  // namespace tg
