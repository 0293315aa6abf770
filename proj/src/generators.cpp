#include "treegrade/generators.hpp"

#include <algorithm>
#include <queue>

#include "treegrade/errors.hpp"
#include "treegrade/prng.hpp"

namespace tg {

const char* piece_shape_name(piece_template::shape s) {
  switch (s) {
    case piece_template::shape::cycle: return "cycle";
    case piece_template::shape::path: return "path";
    case piece_template::shape::complete: return "complete";
  }
  return "cycle";
}

gen_family parse_gen_family(const std::string& name) {
  if (name == "tree_of_pieces") return gen_family::tree_of_pieces;
  if (name == "cycle_chain") return gen_family::cycle_chain;
  if (name == "grid") return gen_family::grid;
  if (name == "random_tree_graded") return gen_family::random_tree_graded;
  if (name == "subdivision") return gen_family::subdivision;
  fail(errc::invalid_argument, "unknown generator family '" + name + "'");
}

const char* gen_family_name(gen_family f) {
  switch (f) {
    case gen_family::tree_of_pieces: return "tree_of_pieces";
    case gen_family::cycle_chain: return "cycle_chain";
    case gen_family::grid: return "grid";
    case gen_family::random_tree_graded: return "random_tree_graded";
    case gen_family::subdivision: return "subdivision";
  }
  return "tree_of_pieces";
}

namespace {

int shape_floor(piece_template::shape s) {
  switch (s) {
    case piece_template::shape::cycle: return 3;
    case piece_template::shape::path: return 2;
    case piece_template::shape::complete: return 2;
  }
  return 3;
}

void validate_template(const piece_template& t) {
  if (t.min_size > t.max_size)
    fail(errc::invalid_argument, "template size range is empty");
  if (t.min_size < shape_floor(t.kind))
    fail(errc::invalid_argument,
         std::string("template shape '") + piece_shape_name(t.kind) +
             "' needs at least " + std::to_string(shape_floor(t.kind)) + " vertices");
}

}  // namespace

void generator_spec::validate() const {
  switch (family) {
    case gen_family::grid:
      if (grid_n < 3) fail(errc::invalid_argument, "grid side must be at least 3");
      return;
    case gen_family::subdivision:
      if (k < 1) fail(errc::invalid_argument, "subdivision factor must be at least 1");
      return;
    default: break;
  }
  if (pieces < 1) fail(errc::invalid_argument, "piece count must be at least 1");
  if (min_size > max_size) fail(errc::invalid_argument, "size range is empty");
  for (const auto& t : templates) validate_template(t);
  if (family == gen_family::tree_of_pieces && templates.empty()) {
    piece_template d;
    d.min_size = min_size;
    d.max_size = max_size;
    validate_template(d);
  }
  if (family == gen_family::cycle_chain && min_size < 3)
    fail(errc::invalid_argument, "cycle pieces need at least 3 vertices");
}

namespace {

// Random labeled tree on p nodes from a seeded Prüfer sequence.
std::vector<std::pair<int, int>> random_tree(int p, splitmix64& rng) {
  std::vector<std::pair<int, int>> edges;
  if (p <= 1) return edges;
  if (p == 2) {
    edges.emplace_back(0, 1);
    return edges;
  }
  std::vector<int> seq(static_cast<std::size_t>(p - 2));
  for (int& s : seq) s = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(p)));
  std::vector<int> degree(static_cast<std::size_t>(p), 1);
  for (int s : seq) ++degree[static_cast<std::size_t>(s)];
  for (int s : seq) {
    int leaf = -1;
    for (int v = 0; v < p; ++v)
      if (degree[static_cast<std::size_t>(v)] == 1) { leaf = v; break; }
    edges.emplace_back(leaf, s);
    degree[static_cast<std::size_t>(leaf)] = 0;
    --degree[static_cast<std::size_t>(s)];
  }
  int a = -1, b = -1;
  for (int v = 0; v < p; ++v)
    if (degree[static_cast<std::size_t>(v)] == 1) (a < 0 ? a : b) = v;
  edges.emplace_back(a, b);
  return edges;
}

struct local_piece {
  piece_template::shape kind;
  int size;
  std::vector<std::pair<int, int>> edges;  // on local ids 0..size-1; 0 is the glue point
};

local_piece make_piece(piece_template::shape kind, int size) {
  local_piece out;
  out.kind = kind;
  out.size = size;
  switch (kind) {
    case piece_template::shape::cycle:
      for (int t = 0; t < size; ++t) out.edges.emplace_back(t, (t + 1) % size);
      break;
    case piece_template::shape::path:
      for (int t = 0; t + 1 < size; ++t) out.edges.emplace_back(t, t + 1);
      break;
    case piece_template::shape::complete:
      for (int u = 0; u < size; ++u)
        for (int v = u + 1; v < size; ++v) out.edges.emplace_back(u, v);
      break;
  }
  return out;
}

}  // namespace

generated_instance gen_tree_of_pieces(const generator_spec& spec) {
  spec.validate();
  std::vector<piece_template> templates;
  switch (spec.family) {
    case gen_family::tree_of_pieces:
      templates = spec.templates;
      if (templates.empty()) {
        piece_template d;
        d.min_size = spec.min_size;
        d.max_size = spec.max_size;
        templates.push_back(d);
      }
      break;
    case gen_family::cycle_chain: {
      piece_template d;
      d.min_size = std::max(3, spec.min_size);
      d.max_size = std::max(d.min_size, spec.max_size);
      templates.push_back(d);
      break;
    }
    case gen_family::random_tree_graded: {
      piece_template cyc;
      cyc.min_size = 3;
      cyc.max_size = 10;
      piece_template pat;
      pat.kind = piece_template::shape::path;
      pat.min_size = 2;
      pat.max_size = 6;
      piece_template com;
      com.kind = piece_template::shape::complete;
      com.min_size = 3;
      com.max_size = 5;
      templates = {cyc, pat, com};
      break;
    }
    default:
      fail(errc::invalid_argument,
           std::string("family '") + gen_family_name(spec.family) +
               "' does not generate glued pieces");
  }

  splitmix64 rng(spec.seed);
  const int p = spec.pieces;

  std::vector<std::pair<int, int>> tree;
  if (spec.family == gen_family::cycle_chain) {
    for (int i = 0; i + 1 < p; ++i) tree.emplace_back(i, i + 1);
  } else {
    tree = random_tree(p, rng);
  }
  std::vector<std::vector<int>> children(static_cast<std::size_t>(p));
  {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(p));
    for (auto [a, b] : tree) {
      adj[static_cast<std::size_t>(a)].push_back(b);
      adj[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    std::vector<char> seen(static_cast<std::size_t>(p), 0);
    std::queue<int> order;
    order.push(0);
    seen[0] = 1;
    while (!order.empty()) {
      int u = order.front();
      order.pop();
      for (int w : adj[static_cast<std::size_t>(u)])
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          children[static_cast<std::size_t>(u)].push_back(w);
          order.push(w);
        }
    }
  }

  generated_instance out;
  out.parent.assign(static_cast<std::size_t>(p), -1);
  out.glue_points.assign(static_cast<std::size_t>(p), -1);
  out.piece_shapes.resize(static_cast<std::size_t>(p));
  std::vector<std::vector<vertex_id>> piece_vertices(static_cast<std::size_t>(p));
  std::vector<std::pair<vertex_id, vertex_id>> edges;
  vertex_id next_id = 0;

  // Draw order is fixed (BFS over the piece tree; per piece: template, size,
  // then one glue draw per child) so identical spec+seed reproduces the
  // instance byte for byte.
  std::queue<std::pair<int, vertex_id>> work;  // piece index, glue vertex (-1 at root)
  work.emplace(0, -1);
  while (!work.empty()) {
    auto [node, glue] = work.front();
    work.pop();
    const piece_template& chosen =
        templates[templates.size() == 1
                      ? 0
                      : static_cast<std::size_t>(rng.next_below(templates.size()))];
    int size = static_cast<int>(
        rng.next_in(static_cast<std::uint64_t>(chosen.min_size),
                    static_cast<std::uint64_t>(chosen.max_size)));
    local_piece shape = make_piece(chosen.kind, size);
    out.piece_shapes[static_cast<std::size_t>(node)] = piece_shape_name(chosen.kind);
    out.glue_points[static_cast<std::size_t>(node)] = glue;

    std::vector<vertex_id> ids(static_cast<std::size_t>(size));
    for (int t = 0; t < size; ++t) {
      if (t == 0 && glue >= 0)
        ids[0] = glue;
      else
        ids[static_cast<std::size_t>(t)] = next_id++;
    }
    for (auto [u, v] : shape.edges)
      edges.emplace_back(ids[static_cast<std::size_t>(u)], ids[static_cast<std::size_t>(v)]);
    piece_vertices[static_cast<std::size_t>(node)] = ids;

    for (int child : children[static_cast<std::size_t>(node)]) {
      out.parent[static_cast<std::size_t>(child)] = node;
      vertex_id at = ids[static_cast<std::size_t>(rng.next_below(ids.size()))];
      work.emplace(child, at);
    }
  }

  out.graph = metric_graph(next_id, edges);
  out.decomposition.base_piece = 0;
  out.decomposition.pieces.reserve(static_cast<std::size_t>(p));
  for (auto& ids : piece_vertices) out.decomposition.pieces.emplace_back(std::move(ids));
  return out;
}

std::pair<metric_graph, piece_decomposition> gen_grid(int n) {
  if (n < 3) fail(errc::invalid_argument, "grid side must be at least 3");
  std::vector<std::pair<vertex_id, vertex_id>> edges;
  auto at = [n](int r, int c) { return static_cast<vertex_id>(r * n + c); };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (c + 1 < n) edges.emplace_back(at(r, c), at(r, c + 1));
      if (r + 1 < n) edges.emplace_back(at(r, c), at(r + 1, c));
    }
  metric_graph g(static_cast<vertex_id>(n) * n, edges);
  piece_decomposition rows;
  rows.base_piece = 0;
  for (int r = 0; r < n; ++r) {
    std::vector<vertex_id> row(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) row[static_cast<std::size_t>(c)] = at(r, c);
    rows.pieces.emplace_back(std::move(row));
  }
  return {std::move(g), std::move(rows)};
}

subdivision_result subdivide(const metric_graph& g, int k) {
  if (k < 1) fail(errc::invalid_argument, "subdivision factor must be at least 1");
  subdivision_result out;
  out.map.k = k;
  out.map.c = k - 1;
  out.map.image.resize(static_cast<std::size_t>(g.vertex_count()));
  for (vertex_id v = 0; v < g.vertex_count(); ++v)
    out.map.image[static_cast<std::size_t>(v)] = v;
  if (k == 1) {
    out.map.c = 0;
    out.graph = g;
    return out;
  }
  std::vector<std::pair<vertex_id, vertex_id>> edges;
  vertex_id next_id = g.vertex_count();
  for (const auto& [u, v] : g.edges()) {
    vertex_id prev = u;
    for (int t = 0; t + 1 < k; ++t) {
      edges.emplace_back(prev, next_id);
      prev = next_id++;
    }
    edges.emplace_back(prev, v);
  }
  out.graph = metric_graph(next_id, edges);
  return out;
}

}  // namespace tg
