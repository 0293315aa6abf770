#pragma once
// Seeded generators for positive and negative test families with known
// ground truth: trees of template pieces glued at single vertices, square
// grids (the negative control), and edge subdivisions with their
// quasi-isometry data.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "treegrade/rbp.hpp"

namespace tg {

struct piece_template {
  enum class shape { cycle, path, complete };
  shape kind = shape::cycle;
  int min_size = 3;
  int max_size = 8;
};

const char* piece_shape_name(piece_template::shape s);

enum class gen_family { tree_of_pieces, cycle_chain, grid, random_tree_graded, subdivision };
gen_family parse_gen_family(const std::string& name);
const char* gen_family_name(gen_family f);

struct generator_spec {
  gen_family family = gen_family::tree_of_pieces;
  int pieces = 4;        // glued families: number of pieces
  int min_size = 3;      // default template size range
  int max_size = 8;
  int grid_n = 3;        // grid side length
  int k = 2;             // subdivision factor
  std::uint64_t seed = 0;
  // Used by tree_of_pieces; empty means cycles over [min_size, max_size].
  std::vector<piece_template> templates;

  void validate() const;
};

// Ground truth that makes generated instances self-describing in tests.
struct generated_instance {
  metric_graph graph;
  piece_decomposition decomposition;
  std::vector<int> parent;               // tree parent per piece, -1 at the root
  std::vector<vertex_id> glue_points;    // shared vertex per piece, -1 at the root
  std::vector<std::string> piece_shapes;
};

// Pieces drawn from templates, glued along a random labeled tree (seeded
// Prüfer sequence) at single shared vertices.  Output is tree-graded by
// construction.  Handles the tree_of_pieces, cycle_chain, and
// random_tree_graded families.
generated_instance gen_tree_of_pieces(const generator_spec& spec);

// n-by-n grid with pieces given by rows: connected, diameter 2(n-1), and
// no piece pair admits a bottleneck certificate since rows are disjoint.
std::pair<metric_graph, piece_decomposition> gen_grid(int n);

struct subdivision_result {
  metric_graph graph;
  qi_map map;  // a (k, k-1) quasi-isometry from the original graph
};

// Replaces every edge by a path of k edges; original vertices keep their
// ids and distances scale exactly by k.
subdivision_result subdivide(const metric_graph& g, int k);

}  // namespace tg
