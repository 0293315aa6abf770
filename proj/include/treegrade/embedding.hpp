#pragma once
// Coordinate-tree embeddings of pieces and the induced product-of-trees
// collapse.
//
// A piece embedding sends one piece graph into a finite list of trees so
// that the sup metric over the coordinates matches the piece metric up to
// certified multiplicative/additive constants, and every single coordinate
// is nonexpansive.  replace_pieces swaps each piece of a realized space for
// the strong product of its coordinate trees (the graph metric of a strong
// product is exactly the sup metric), reattaching the bridge arcs at the
// image tuples.  coordinate_trees then collapses the product space onto one
// tree per coordinate; measure_embedding certifies the collapse maps and
// reports the measured distortion of the whole pipeline.

#include <cstdint>
#include <vector>

#include "treegrade/treegraded.hpp"

namespace tg {

// ---- piece_tree_embedding ----

// One piece mapped into `trees.size()` coordinate trees.  `image[v]` lists
// the image of local vertex v in each tree.  The certified contract, checked
// exhaustively by verify_piece_embedding, is
//
//   d_tree_j(image_j(u), image_j(v)) <= d_piece(u, v)          for every j,
//   d_piece(u, v) <= k * max_j d_tree_j(image_j(u), image_j(v)) + k * c.
//
// The first line makes every later coordinate collapse nonexpansive; the
// second is the two-sided quasi-isometry bound with constants (k, c).
struct piece_tree_embedding {
  int piece = -1;
  long long k = 1;
  long long c = 0;
  std::vector<metric_graph> trees;
  std::vector<std::vector<vertex_id>> image;

  int coordinates() const { return static_cast<int>(trees.size()); }
};

// Re-checks the full contract above over all vertex pairs of the piece.
// Raises CycleInCoordinateTree, InvalidArgument, LipschitzViolation or
// BoundViolated on the first defect.
void verify_piece_embedding(const metric_graph& piece_graph, const piece_tree_embedding& e);

// A tree piece embeds into itself: one coordinate, constants (1, 0).
// Raises UnsupportedPieceShape if the piece has a cycle.
piece_tree_embedding identity_piece_embedding(const metric_graph& piece_graph, int piece);

// A unicyclic piece whose cycle length is divisible by four embeds into two
// trees with constants (2, 0): the cycle of length 4k walks the boundary of
// a combinatorial k-by-k square whose x and y projections are paths, and
// every pendant tree is copied into both coordinates below its anchor's
// projection.  Raises UnsupportedPieceShape otherwise (no cycle, more than
// one cycle, or length not divisible by four).
piece_tree_embedding cycle_piece_embedding(const metric_graph& piece_graph, int piece);

// Pads an embedding to `l` coordinates with single-vertex trees; the sup
// metric and the certified constants are unchanged.
void pad_embedding(piece_tree_embedding& e, int l);

// One embedding per piece of the realized space: identity for tree pieces,
// the square-boundary embedding for unicyclic pieces, all padded to a common
// coordinate count.  Raises UnsupportedPieceShape for anything else.
std::vector<piece_tree_embedding> bundled_embeddings(const tree_graded_space& t);

// ---- product space ----

// The realized space with every piece replaced by the strong product of its
// coordinate trees.  `space` is a fully functional tree-graded realization
// (its piece graphs are the products, local ids are tuple indices), so the
// transit oracle and the structural verifier apply unchanged.  `lift` sends
// every vertex of the original realization to its image tuple (or the
// matching arc-interior vertex).
struct product_space {
  tree_graded_space space;
  metric_graph source;
  std::vector<piece_tree_embedding> embeddings;
  std::vector<vertex_id> lift;
  int coordinates = 0;

  // Tuple <-> local product index, mixed radix over the coordinate tree
  // sizes of `piece` (last coordinate varies fastest).
  long long tuple_index(int piece, const std::vector<vertex_id>& tuple) const;
  std::vector<vertex_id> tuple_of(int piece, vertex_id local) const;
};

// Replaces each piece by its product and reattaches every arc at the image
// tuples of its former endpoints.  Requires one embedding per piece, stamped
// in order and with a common coordinate count (CoordinateMismatch
// otherwise); an attach vertex without an image tuple raises
// AttachPointUnmapped.  Every embedding is re-verified exhaustively.
product_space replace_pieces(const tree_graded_space& t, std::vector<piece_tree_embedding> embeds);

// ---- coordinate collapse ----

// One tree per coordinate: T_j glues the j-th coordinate trees of all pieces
// with a full-length copy of every arc, and psi[j] maps each vertex of the
// product realization to its j-th coordinate.  Every psi[j] is required to
// be exactly nonexpansive edge by edge (LipschitzViolation otherwise) and
// every T_j must be acyclic (CycleInCoordinateTree otherwise).
struct coordinate_collapse {
  std::vector<metric_graph> trees;
  std::vector<std::vector<vertex_id>> psi;
};

coordinate_collapse coordinate_trees(const product_space& p);

// ---- measurement ----

// Exact per-pair guarantees asserted over the sampled pairs, with l the
// coordinate count and d' the product-space distance:
//
//   d_Tj(psi_j x, psi_j y) <= d'(x, y)            for every coordinate j,
//   sum_j d_Tj(psi_j x, psi_j y) >= d'(x, y),
//   l * max_j d_Tj(psi_j x, psi_j y) >= d'(x, y).
//
// The unscaled sup-form inequality max_j >= d' holds inside a single piece
// (there the sup over coordinates is the piece metric) but cannot hold
// globally once two pieces contribute legs that are axis-aligned in
// complementary coordinates: each coordinate then misses one leg, while the
// sum and the scaled max still dominate.  `unscaled_hits` counts the pairs
// where it holds anyway, and `step_lower` reports the measured sup-side
// lower constant max d'/max_j (at most l).  A violation of any asserted
// line raises LipschitzViolation or NonDecreasingViolated.
//
// The composite ratios track the full pipeline from the original realized
// space through `lift` into the coordinate trees under the sup metric:
// composite_upper = max over sampled source pairs of max_j/d_source (always
// at most 1) and composite_lower = max of d_source/max_j.
struct embedding_report {
  std::uint64_t pairs_checked = 0;
  std::uint64_t lifted_pairs = 0;
  int coordinates = 0;
  long long piece_k = 1;
  long long piece_c = 0;
  std::uint64_t unscaled_hits = 0;
  double step_lower = 1.0;
  double composite_lower = 1.0;
  double composite_upper = 1.0;
  bool passed = false;
};

embedding_report measure_embedding(const product_space& p, const coordinate_collapse& cc,
                                   const sample_spec& pairs);

}  // namespace tg
