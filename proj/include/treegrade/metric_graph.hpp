#pragma once
// Finite connected graphs with unit edge lengths, plus the exact metric
// primitives (balls, neighborhoods, geodesics, separation tests) that the
// rest of the library builds on.  All distances are integers; balls use a
// strict inequality and tubular neighborhoods a weak one throughout.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treegrade/errors.hpp"

namespace tg {

using vertex_id = std::int32_t;

// Sorted duplicate-free vertex set.
class point_set {
 public:
  point_set() = default;
  explicit point_set(std::vector<vertex_id> vertices);

  bool contains(vertex_id v) const;
  void insert(vertex_id v);
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<vertex_id>& items() const { return items_; }
  std::vector<vertex_id>::const_iterator begin() const { return items_.begin(); }
  std::vector<vertex_id>::const_iterator end() const { return items_.end(); }

  point_set set_minus(const point_set& other) const;
  point_set set_and(const point_set& other) const;
  point_set set_or(const point_set& other) const;

  bool operator==(const point_set&) const = default;

 private:
  std::vector<vertex_id> items_;
};

// Exact nonnegative rational radius.  Distances are integers, so every
// comparison against a radius reduces to one integer multiply.
struct rational {
  long long num = 0;
  long long den = 1;

  rational() = default;
  rational(long long n, long long d);
  static rational of(long long n) { return rational(n, 1); }
  // Accepts "7", "5/2" and decimal literals like "2.5".
  static rational parse(const std::string& text);

  // d < num/den for an integer distance d.
  bool int_less(long long d) const { return d * den < num; }
  std::string str() const;
};

class metric_graph {
 public:
  // Empty placeholder, only useful as an assignment target.
  metric_graph() = default;
  // Vertices are 0..n-1.  Edges must be loop-free, duplicate-free and the
  // graph connected; violations raise InvalidArgument.
  metric_graph(vertex_id n, std::vector<std::pair<vertex_id, vertex_id>> edges);

  vertex_id vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  // Neighbor lists are sorted by id; iteration order is part of the
  // deterministic contract (canonical geodesics rely on it).
  const std::vector<vertex_id>& neighbors(vertex_id v) const { return adj_[v]; }
  // Normalized (u < v) edge list, lexicographically sorted.
  const std::vector<std::pair<vertex_id, vertex_id>>& edges() const { return edges_; }
  bool has_edge(vertex_id u, vertex_id v) const;

 private:
  vertex_id n_ = 0;
  std::vector<std::pair<vertex_id, vertex_id>> edges_;
  std::vector<std::vector<vertex_id>> adj_;
};

// A concrete vertex path; consecutive vertices must be adjacent.
struct path_witness {
  std::vector<vertex_id> vertices;

  std::size_t length() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  bool valid_in(const metric_graph& g) const;
  path_witness reversed() const;
};

// Single-source and multi-source BFS distance vectors (-1 = unreachable).
std::vector<int> distances_from(const metric_graph& g, vertex_id source);
std::vector<int> distances_from(const metric_graph& g, const point_set& sources);

// Open ball {x : d(w,x) < r}.
point_set open_ball(const metric_graph& g, vertex_id w, const rational& r);
point_set open_ball(const metric_graph& g, vertex_id w, long long r);

// Closed tubular neighborhood {x : d(x,A) <= r}.
point_set closed_neighborhood(const metric_graph& g, const point_set& a, long long r);

// All vertices lying on some geodesic from x to y.
point_set geodesic_vertices(const metric_graph& g, vertex_id x, vertex_id y);

// The deterministic geodesic from x to y: walk x toward the shortest-path
// tree rooted at y whose parent ties are broken toward the smallest id.
path_witness canonical_geodesic(const metric_graph& g, vertex_id x, vertex_id y);

// Component labels of g with `removed` deleted; removed vertices get -1.
// Reusable across many separation queries against the same ball.
struct separation_labels {
  std::vector<int> comp;
};
separation_labels label_components_minus(const metric_graph& g, const point_set& removed);

struct blocks_result {
  bool blocked = false;
  // Populated when !blocked: a concrete a-to-b path avoiding the ball.
  std::optional<path_witness> avoiding_path;
};

// True iff every path from a to b meets `ball`: either a or b is swallowed
// by the ball, or no component of g - ball meets both.
blocks_result blocks_all_paths(const metric_graph& g, const point_set& a,
                               const point_set& b, const point_set& ball);
// Fast variant against precomputed labels; extracts a witness on demand.
blocks_result blocks_all_paths(const metric_graph& g, const point_set& a,
                               const point_set& b, const point_set& ball,
                               const separation_labels& labels);

// Pair selection shared by every sampled check: either the full pair set or
// a seeded pseudo-random subset of fixed size.
struct sample_spec {
  enum class mode { all, sample };
  mode kind = mode::all;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;

  static sample_spec all() { return {}; }
  static sample_spec sample(std::uint64_t count, std::uint64_t seed);
  // Accepts "all" or "sample:K".
  static sample_spec parse(const std::string& text, std::uint64_t seed);
  std::string str() const;
};

// Deterministic list of index pairs i < j drawn from {0..n-1}.
std::vector<std::pair<int, int>> select_pairs(int n, const sample_spec& spec);

// Manning's bottleneck property at scale delta: for each selected vertex
// pair, the open delta-ball around the canonical geodesic's midpoint
// (rounded toward x at odd distance) must meet every x-to-y path.
struct manning_failure {
  vertex_id x = 0;
  vertex_id y = 0;
  vertex_id midpoint = 0;
  path_witness avoiding_path;
};

struct manning_report {
  bool passed = true;
  rational delta;
  std::uint64_t pairs_checked = 0;
  std::vector<manning_failure> failures;
};

manning_report check_manning_bp(const metric_graph& g, const rational& delta,
                                const sample_spec& pairs);

}  // namespace tg
