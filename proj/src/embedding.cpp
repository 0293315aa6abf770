#include "treegrade/embedding.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <utility>

#include "treegrade/errors.hpp"

namespace tg {

namespace {

std::string piece_tag(int i) { return "piece " + std::to_string(i); }

bool is_tree(const metric_graph& g) {
  return g.edge_count() + 1 == static_cast<std::size_t>(g.vertex_count());
}

// Mixed-radix strides over the coordinate tree sizes, last coordinate
// varying fastest.
std::vector<long long> tree_strides(const piece_tree_embedding& e) {
  const int l = e.coordinates();
  std::vector<long long> strides(static_cast<std::size_t>(l), 1);
  for (int j = l - 2; j >= 0; --j)
    strides[static_cast<std::size_t>(j)] =
        strides[static_cast<std::size_t>(j + 1)] * e.trees[static_cast<std::size_t>(j + 1)].vertex_count();
  return strides;
}

long long product_size(const piece_tree_embedding& e) {
  long long total = 1;
  for (const auto& tree : e.trees) total *= tree.vertex_count();
  return total;
}

}  // namespace

// ---- verification ----

void verify_piece_embedding(const metric_graph& piece_graph, const piece_tree_embedding& e) {
  const vertex_id n = piece_graph.vertex_count();
  const int l = e.coordinates();
  if (l == 0)
    fail(errc::invalid_argument, piece_tag(e.piece) + " embedding has no coordinate trees");
  if (e.k < 1 || e.c < 0)
    fail(errc::invalid_argument,
         piece_tag(e.piece) + " embedding needs constants k >= 1 and c >= 0");
  for (int j = 0; j < l; ++j)
    if (!is_tree(e.trees[static_cast<std::size_t>(j)]))
      fail(errc::cycle_in_coordinate_tree, "coordinate tree " + std::to_string(j) + " of " +
                                               piece_tag(e.piece) + " is not a tree");
  if (static_cast<vertex_id>(e.image.size()) != n)
    fail(errc::invalid_argument, piece_tag(e.piece) + " embedding maps " +
                                     std::to_string(e.image.size()) + " vertices but the piece has " +
                                     std::to_string(n));
  for (vertex_id v = 0; v < n; ++v) {
    const auto& row = e.image[static_cast<std::size_t>(v)];
    if (static_cast<int>(row.size()) != l)
      fail(errc::invalid_argument, "image of vertex " + std::to_string(v) + " in " +
                                       piece_tag(e.piece) + " has arity " +
                                       std::to_string(row.size()) + ", expected " + std::to_string(l));
    for (int j = 0; j < l; ++j) {
      const vertex_id x = row[static_cast<std::size_t>(j)];
      if (x < 0 || x >= e.trees[static_cast<std::size_t>(j)].vertex_count())
        fail(errc::invalid_argument, "image of vertex " + std::to_string(v) + " in " +
                                         piece_tag(e.piece) + " escapes coordinate tree " +
                                         std::to_string(j));
    }
  }
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(l));
  for (vertex_id u = 0; u < n; ++u) {
    const auto dg = distances_from(piece_graph, u);
    for (int j = 0; j < l; ++j)
      rows[static_cast<std::size_t>(j)] = distances_from(
          e.trees[static_cast<std::size_t>(j)],
          e.image[static_cast<std::size_t>(u)][static_cast<std::size_t>(j)]);
    for (vertex_id v = u + 1; v < n; ++v) {
      const long long d = dg[static_cast<std::size_t>(v)];
      long long maxd = 0;
      for (int j = 0; j < l; ++j) {
        const long long dj =
            rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(
                e.image[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)])];
        if (dj > d)
          fail(errc::lipschitz_violation,
               "coordinate " + std::to_string(j) + " of " + piece_tag(e.piece) +
                   " stretches vertices " + std::to_string(u) + " and " + std::to_string(v) + ": " +
                   std::to_string(dj) + " > " + std::to_string(d));
        maxd = std::max(maxd, dj);
      }
      if (d > e.k * maxd + e.k * e.c)
        fail(errc::bound_violated, piece_tag(e.piece) + " pair (" + std::to_string(u) + ", " +
                                       std::to_string(v) + "): piece distance " + std::to_string(d) +
                                       " exceeds the certified bound " +
                                       std::to_string(e.k * maxd + e.k * e.c));
    }
  }
}

// ---- bundled builders ----

piece_tree_embedding identity_piece_embedding(const metric_graph& piece_graph, int piece) {
  if (!is_tree(piece_graph))
    fail(errc::unsupported_piece_shape,
         piece_tag(piece) + " has a cycle; the identity embedding needs an acyclic piece");
  piece_tree_embedding e;
  e.piece = piece;
  e.k = 1;
  e.c = 0;
  e.trees.push_back(piece_graph);
  e.image.resize(static_cast<std::size_t>(piece_graph.vertex_count()));
  for (vertex_id v = 0; v < piece_graph.vertex_count(); ++v)
    e.image[static_cast<std::size_t>(v)] = {v};
  verify_piece_embedding(piece_graph, e);
  return e;
}

piece_tree_embedding cycle_piece_embedding(const metric_graph& piece_graph, int piece) {
  const vertex_id n = piece_graph.vertex_count();

  // Peel leaves; what survives is the unique cycle of a unicyclic graph.
  std::vector<int> degree(static_cast<std::size_t>(n));
  std::vector<char> core(static_cast<std::size_t>(n), 1);
  std::queue<vertex_id> strip;
  for (vertex_id v = 0; v < n; ++v) {
    degree[static_cast<std::size_t>(v)] = static_cast<int>(piece_graph.neighbors(v).size());
    if (degree[static_cast<std::size_t>(v)] <= 1) strip.push(v);
  }
  while (!strip.empty()) {
    const vertex_id v = strip.front();
    strip.pop();
    if (!core[static_cast<std::size_t>(v)]) continue;
    core[static_cast<std::size_t>(v)] = 0;
    for (vertex_id w : piece_graph.neighbors(v))
      if (core[static_cast<std::size_t>(w)] && --degree[static_cast<std::size_t>(w)] == 1)
        strip.push(w);
  }
  std::vector<vertex_id> cycle;
  for (vertex_id v = 0; v < n; ++v)
    if (core[static_cast<std::size_t>(v)]) cycle.push_back(v);
  if (cycle.empty())
    fail(errc::unsupported_piece_shape,
         piece_tag(piece) + " has no cycle; use the identity embedding");
  for (vertex_id v : cycle) {
    int core_neighbors = 0;
    for (vertex_id w : piece_graph.neighbors(v))
      if (core[static_cast<std::size_t>(w)]) ++core_neighbors;
    if (core_neighbors != 2)
      fail(errc::unsupported_piece_shape, piece_tag(piece) + " is not unicyclic");
  }
  const long long nc = static_cast<long long>(cycle.size());
  if (nc % 4 != 0)
    fail(errc::unsupported_piece_shape, piece_tag(piece) + " has cycle length " +
                                            std::to_string(nc) +
                                            ", which is not divisible by four");
  const vertex_id k = static_cast<vertex_id>(nc / 4);

  // Walk the cycle from its smallest vertex toward the smaller neighbor.
  std::vector<long long> pos(static_cast<std::size_t>(n), -1);
  vertex_id cur = cycle.front();
  for (long long step = 0; step < nc; ++step) {
    pos[static_cast<std::size_t>(cur)] = step;
    vertex_id nxt = -1;
    for (vertex_id w : piece_graph.neighbors(cur))
      if (core[static_cast<std::size_t>(w)] && pos[static_cast<std::size_t>(w)] < 0) {
        nxt = w;
        break;
      }
    if (nxt < 0) break;
    cur = nxt;
  }

  // The cycle of length 4k runs along the boundary of a k-by-k square; its
  // x and y projections are the two coordinate paths.
  auto square = [k](long long p) -> std::pair<vertex_id, vertex_id> {
    if (p <= k) return {static_cast<vertex_id>(p), 0};
    if (p <= 2LL * k) return {k, static_cast<vertex_id>(p - k)};
    if (p <= 3LL * k) return {static_cast<vertex_id>(3LL * k - p), k};
    return {0, static_cast<vertex_id>(4LL * k - p)};
  };

  // Pendant trees hang below the projection of their cycle anchor, copied
  // verbatim into both coordinates.
  std::vector<vertex_id> parent(static_cast<std::size_t>(n), -1);
  {
    std::vector<char> seen(core.begin(), core.end());
    std::queue<vertex_id> bfs;
    for (vertex_id v : cycle) bfs.push(v);
    while (!bfs.empty()) {
      const vertex_id u = bfs.front();
      bfs.pop();
      for (vertex_id w : piece_graph.neighbors(u))
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          parent[static_cast<std::size_t>(w)] = u;
          bfs.push(w);
        }
    }
  }
  std::vector<vertex_id> branch(static_cast<std::size_t>(n), -1);
  vertex_id tree_size = k + 1;
  for (vertex_id v = 0; v < n; ++v)
    if (!core[static_cast<std::size_t>(v)]) branch[static_cast<std::size_t>(v)] = tree_size++;

  std::vector<std::pair<vertex_id, vertex_id>> ex, ey;
  for (vertex_id i = 0; i < k; ++i) {
    ex.emplace_back(i, i + 1);
    ey.emplace_back(i, i + 1);
  }
  for (vertex_id v = 0; v < n; ++v) {
    if (core[static_cast<std::size_t>(v)]) continue;
    const vertex_id pv = parent[static_cast<std::size_t>(v)];
    const vertex_id bv = branch[static_cast<std::size_t>(v)];
    if (core[static_cast<std::size_t>(pv)]) {
      const auto [x, y] = square(pos[static_cast<std::size_t>(pv)]);
      ex.emplace_back(bv, x);
      ey.emplace_back(bv, y);
    } else {
      ex.emplace_back(bv, branch[static_cast<std::size_t>(pv)]);
      ey.emplace_back(bv, branch[static_cast<std::size_t>(pv)]);
    }
  }

  piece_tree_embedding e;
  e.piece = piece;
  e.k = 2;
  e.c = 0;
  e.trees.emplace_back(tree_size, std::move(ex));
  e.trees.emplace_back(tree_size, std::move(ey));
  e.image.resize(static_cast<std::size_t>(n));
  for (vertex_id v = 0; v < n; ++v) {
    if (core[static_cast<std::size_t>(v)]) {
      const auto [x, y] = square(pos[static_cast<std::size_t>(v)]);
      e.image[static_cast<std::size_t>(v)] = {x, y};
    } else {
      const vertex_id bv = branch[static_cast<std::size_t>(v)];
      e.image[static_cast<std::size_t>(v)] = {bv, bv};
    }
  }
  verify_piece_embedding(piece_graph, e);
  return e;
}

void pad_embedding(piece_tree_embedding& e, int l) {
  if (e.coordinates() > l)
    fail(errc::coordinate_mismatch, piece_tag(e.piece) + " already has " +
                                        std::to_string(e.coordinates()) +
                                        " coordinates, cannot pad to " + std::to_string(l));
  while (e.coordinates() < l)
    e.trees.emplace_back(1, std::vector<std::pair<vertex_id, vertex_id>>{});
  for (auto& row : e.image)
    if (static_cast<int>(row.size()) < l) row.resize(static_cast<std::size_t>(l), 0);
}

std::vector<piece_tree_embedding> bundled_embeddings(const tree_graded_space& t) {
  std::vector<piece_tree_embedding> out;
  out.reserve(static_cast<std::size_t>(t.piece_count()));
  int l = 1;
  for (int i = 0; i < t.piece_count(); ++i) {
    const metric_graph& h = t.piece_graphs[static_cast<std::size_t>(i)];
    out.push_back(is_tree(h) ? identity_piece_embedding(h, i) : cycle_piece_embedding(h, i));
    l = std::max(l, out.back().coordinates());
  }
  for (auto& e : out) pad_embedding(e, l);
  return out;
}

// ---- product space ----

long long product_space::tuple_index(int piece, const std::vector<vertex_id>& tuple) const {
  if (piece < 0 || static_cast<std::size_t>(piece) >= embeddings.size())
    fail(errc::invalid_argument, piece_tag(piece) + " is out of range");
  const piece_tree_embedding& e = embeddings[static_cast<std::size_t>(piece)];
  const int l = e.coordinates();
  if (static_cast<int>(tuple.size()) != l)
    fail(errc::invalid_argument, "tuple arity " + std::to_string(tuple.size()) +
                                     " does not match the " + std::to_string(l) +
                                     " coordinates of " + piece_tag(piece));
  const auto strides = tree_strides(e);
  long long idx = 0;
  for (int j = 0; j < l; ++j) {
    const vertex_id x = tuple[static_cast<std::size_t>(j)];
    if (x < 0 || x >= e.trees[static_cast<std::size_t>(j)].vertex_count())
      fail(errc::invalid_argument,
           "tuple coordinate " + std::to_string(j) + " escapes its tree in " + piece_tag(piece));
    idx += static_cast<long long>(x) * strides[static_cast<std::size_t>(j)];
  }
  return idx;
}

std::vector<vertex_id> product_space::tuple_of(int piece, vertex_id local) const {
  if (piece < 0 || static_cast<std::size_t>(piece) >= embeddings.size())
    fail(errc::invalid_argument, piece_tag(piece) + " is out of range");
  const piece_tree_embedding& e = embeddings[static_cast<std::size_t>(piece)];
  if (local < 0 || static_cast<long long>(local) >= product_size(e))
    fail(errc::invalid_argument, "local index " + std::to_string(local) +
                                     " escapes the product of " + piece_tag(piece));
  const int l = e.coordinates();
  const auto strides = tree_strides(e);
  std::vector<vertex_id> tuple(static_cast<std::size_t>(l));
  for (int j = 0; j < l; ++j)
    tuple[static_cast<std::size_t>(j)] = static_cast<vertex_id>(
        (local / strides[static_cast<std::size_t>(j)]) %
        e.trees[static_cast<std::size_t>(j)].vertex_count());
  return tuple;
}

product_space replace_pieces(const tree_graded_space& t, std::vector<piece_tree_embedding> embeds) {
  const int n = t.piece_count();
  if (static_cast<int>(embeds.size()) != n)
    fail(errc::invalid_argument, "expected one embedding per piece, got " +
                                     std::to_string(embeds.size()) + " for " + std::to_string(n) +
                                     " pieces");
  for (int i = 0; i < n; ++i)
    if (embeds[static_cast<std::size_t>(i)].piece != i)
      fail(errc::invalid_argument,
           "embedding at position " + std::to_string(i) + " is stamped for " +
               piece_tag(embeds[static_cast<std::size_t>(i)].piece));
  const int l = embeds[0].coordinates();
  for (int i = 1; i < n; ++i)
    if (embeds[static_cast<std::size_t>(i)].coordinates() != l)
      fail(errc::coordinate_mismatch,
           "piece 0 has " + std::to_string(l) + " coordinates but " + piece_tag(i) + " has " +
               std::to_string(embeds[static_cast<std::size_t>(i)].coordinates()));

  // Attach points need image tuples before anything else matters, so a
  // missing tuple reports as the specific attach error.
  auto attach_mapped = [&](int piece, vertex_id original) {
    const vertex_id rank = t.local_rank(piece, original);
    const auto& img = embeds[static_cast<std::size_t>(piece)].image;
    if (static_cast<std::size_t>(rank) >= img.size()) return false;
    const auto& row = img[static_cast<std::size_t>(rank)];
    if (static_cast<int>(row.size()) != l) return false;
    for (int j = 0; j < l; ++j) {
      const vertex_id x = row[static_cast<std::size_t>(j)];
      if (x < 0 ||
          x >= embeds[static_cast<std::size_t>(piece)].trees[static_cast<std::size_t>(j)].vertex_count())
        return false;
    }
    return true;
  };
  for (const arc_info& arc : t.arcs) {
    if (!attach_mapped(arc.piece, arc.child_attach))
      fail(errc::attach_point_unmapped,
           "basepoint of " + piece_tag(arc.piece) + " has no image tuple");
    if (!attach_mapped(t.parents[static_cast<std::size_t>(arc.piece)], arc.parent_attach))
      fail(errc::attach_point_unmapped,
           "attach point of " + piece_tag(arc.piece) + " has no image tuple in " +
               piece_tag(t.parents[static_cast<std::size_t>(arc.piece)]));
  }
  for (int i = 0; i < n; ++i)
    verify_piece_embedding(t.piece_graphs[static_cast<std::size_t>(i)],
                           embeds[static_cast<std::size_t>(i)]);

  product_space p;
  p.coordinates = l;
  p.source = t.realized;
  p.embeddings = std::move(embeds);

  tree_graded_space& sp = p.space;
  sp.e_piece = t.e_piece;
  sp.parents = t.parents;
  sp.depth = t.depth;
  sp.underlying_tree = t.underlying_tree;
  sp.arc_of_piece = t.arc_of_piece;

  // Strong products in piece order; the graph metric of a strong product of
  // trees is exactly the sup metric over the coordinates.
  vertex_id next_id = 0;
  std::vector<std::pair<vertex_id, vertex_id>> realized_edges;
  for (int i = 0; i < n; ++i) {
    const piece_tree_embedding& e = p.embeddings[static_cast<std::size_t>(i)];
    const long long size = product_size(e);
    if (size > 2'000'000)
      fail(errc::invalid_argument,
           piece_tag(i) + " product would have " + std::to_string(size) + " vertices");
    const auto strides = tree_strides(e);
    std::vector<std::pair<vertex_id, vertex_id>> local_edges;
    std::vector<vertex_id> digits(static_cast<std::size_t>(l), 0);
    for (long long idx = 0; idx < size; ++idx) {
      // Per coordinate: stay put or step along a tree edge; every mixed
      // combination except all-stay is an edge of the strong product.
      std::vector<std::vector<vertex_id>> options(static_cast<std::size_t>(l));
      for (int j = 0; j < l; ++j) {
        auto& opt = options[static_cast<std::size_t>(j)];
        opt.push_back(digits[static_cast<std::size_t>(j)]);
        for (vertex_id w :
             e.trees[static_cast<std::size_t>(j)].neighbors(digits[static_cast<std::size_t>(j)]))
          opt.push_back(w);
      }
      std::vector<std::size_t> choice(static_cast<std::size_t>(l), 0);
      while (true) {
        long long other = 0;
        for (int j = 0; j < l; ++j)
          other += static_cast<long long>(
                       options[static_cast<std::size_t>(j)][choice[static_cast<std::size_t>(j)]]) *
                   strides[static_cast<std::size_t>(j)];
        if (other > idx)
          local_edges.emplace_back(static_cast<vertex_id>(idx), static_cast<vertex_id>(other));
        int j = l - 1;
        while (j >= 0 && ++choice[static_cast<std::size_t>(j)] ==
                             options[static_cast<std::size_t>(j)].size()) {
          choice[static_cast<std::size_t>(j)] = 0;
          --j;
        }
        if (j < 0) break;
      }
      int j = l - 1;
      while (j >= 0 && ++digits[static_cast<std::size_t>(j)] ==
                           e.trees[static_cast<std::size_t>(j)].vertex_count()) {
        digits[static_cast<std::size_t>(j)] = 0;
        --j;
      }
    }
    sp.piece_graphs.emplace_back(static_cast<vertex_id>(size), std::move(local_edges));
    sp.copy_base.push_back(next_id);
    std::vector<vertex_id> locals(static_cast<std::size_t>(size));
    for (vertex_id a = 0; a < size; ++a) locals[static_cast<std::size_t>(a)] = a;
    sp.hulls.emplace_back(locals);
    for (auto& a : locals) a += next_id;
    sp.copy_sets.emplace_back(std::move(locals));
    for (const auto& [a, b] : sp.piece_graphs.back().edges())
      realized_edges.emplace_back(next_id + a, next_id + b);
    next_id += static_cast<vertex_id>(size);
  }

  // Arcs keep their lengths and reattach at the image tuples.
  for (const arc_info& src : t.arcs) {
    const int i = src.piece;
    const int pi = t.parents[static_cast<std::size_t>(i)];
    arc_info arc;
    arc.piece = i;
    arc.length = src.length;
    const vertex_id rc = t.local_rank(i, src.child_attach);
    const vertex_id rp = t.local_rank(pi, src.parent_attach);
    arc.child_attach = static_cast<vertex_id>(
        p.tuple_index(i, p.embeddings[static_cast<std::size_t>(i)].image[static_cast<std::size_t>(rc)]));
    arc.parent_attach = static_cast<vertex_id>(p.tuple_index(
        pi, p.embeddings[static_cast<std::size_t>(pi)].image[static_cast<std::size_t>(rp)]));
    arc.from = sp.copy_base[static_cast<std::size_t>(i)] + arc.child_attach;
    arc.to = sp.copy_base[static_cast<std::size_t>(pi)] + arc.parent_attach;
    vertex_id prev = arc.from;
    for (long long step = 1; step < arc.length; ++step) {
      arc.interior.push_back(next_id);
      realized_edges.emplace_back(prev, next_id);
      prev = next_id;
      ++next_id;
    }
    realized_edges.emplace_back(prev, arc.to);
    sp.arcs.push_back(std::move(arc));
  }
  sp.realized = metric_graph(next_id, std::move(realized_edges));

  // The lift sends every source vertex to its image tuple (copies) or to
  // the matching interior vertex of the reattached arc.
  p.lift.assign(static_cast<std::size_t>(t.realized.vertex_count()), -1);
  for (int i = 0; i < n; ++i) {
    const auto& img = p.embeddings[static_cast<std::size_t>(i)].image;
    for (std::size_t rank = 0; rank < img.size(); ++rank)
      p.lift[static_cast<std::size_t>(t.copy_base[static_cast<std::size_t>(i)]) + rank] =
          sp.copy_base[static_cast<std::size_t>(i)] +
          static_cast<vertex_id>(p.tuple_index(i, img[rank]));
  }
  for (std::size_t a = 0; a < t.arcs.size(); ++a)
    for (std::size_t step = 0; step < t.arcs[a].interior.size(); ++step)
      p.lift[static_cast<std::size_t>(t.arcs[a].interior[step])] = sp.arcs[a].interior[step];
  return p;
}

// ---- coordinate collapse ----

coordinate_collapse coordinate_trees(const product_space& p) {
  const tree_graded_space& sp = p.space;
  const int n = sp.piece_count();
  const int l = p.coordinates;
  const vertex_id realized_count = sp.realized.vertex_count();

  coordinate_collapse out;
  out.trees.reserve(static_cast<std::size_t>(l));
  out.psi.assign(static_cast<std::size_t>(l),
                 std::vector<vertex_id>(static_cast<std::size_t>(realized_count), -1));
  for (int j = 0; j < l; ++j) {
    auto& psi = out.psi[static_cast<std::size_t>(j)];
    std::vector<vertex_id> base(static_cast<std::size_t>(n), 0);
    vertex_id count = 0;
    std::vector<std::pair<vertex_id, vertex_id>> edges;
    for (int i = 0; i < n; ++i) {
      base[static_cast<std::size_t>(i)] = count;
      const metric_graph& tree =
          p.embeddings[static_cast<std::size_t>(i)].trees[static_cast<std::size_t>(j)];
      for (const auto& [a, b] : tree.edges()) edges.emplace_back(count + a, count + b);
      count += tree.vertex_count();
    }
    for (int i = 0; i < n; ++i) {
      const auto strides = tree_strides(p.embeddings[static_cast<std::size_t>(i)]);
      const vertex_id size = sp.piece_graphs[static_cast<std::size_t>(i)].vertex_count();
      const vertex_id tree_size = p.embeddings[static_cast<std::size_t>(i)]
                                      .trees[static_cast<std::size_t>(j)]
                                      .vertex_count();
      for (vertex_id local = 0; local < size; ++local)
        psi[static_cast<std::size_t>(sp.copy_base[static_cast<std::size_t>(i)] + local)] =
            base[static_cast<std::size_t>(i)] +
            static_cast<vertex_id>((local / strides[static_cast<std::size_t>(j)]) % tree_size);
    }
    // Every arc appears at full length in every coordinate.
    for (const arc_info& arc : sp.arcs) {
      vertex_id prev = psi[static_cast<std::size_t>(arc.from)];
      for (std::size_t step = 0; step < arc.interior.size(); ++step) {
        psi[static_cast<std::size_t>(arc.interior[step])] = count;
        edges.emplace_back(prev, count);
        prev = count;
        ++count;
      }
      edges.emplace_back(prev, psi[static_cast<std::size_t>(arc.to)]);
    }
    metric_graph tree(count, std::move(edges));
    if (!is_tree(tree))
      fail(errc::cycle_in_coordinate_tree,
           "coordinate tree " + std::to_string(j) + " of the product space has a cycle");
    out.trees.push_back(std::move(tree));
  }

  // Each collapse must be nonexpansive edge by edge.
  for (const auto& [u, v] : sp.realized.edges())
    for (int j = 0; j < l; ++j) {
      const vertex_id a = out.psi[static_cast<std::size_t>(j)][static_cast<std::size_t>(u)];
      const vertex_id b = out.psi[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)];
      if (a != b && !out.trees[static_cast<std::size_t>(j)].has_edge(a, b))
        fail(errc::lipschitz_violation, "collapse " + std::to_string(j) +
                                            " stretches the realized edge (" + std::to_string(u) +
                                            ", " + std::to_string(v) + ")");
    }
  return out;
}

// ---- measurement ----

embedding_report measure_embedding(const product_space& p, const coordinate_collapse& cc,
                                   const sample_spec& pairs) {
  const tree_graded_space& sp = p.space;
  const int l = p.coordinates;
  if (static_cast<int>(cc.trees.size()) != l || static_cast<int>(cc.psi.size()) != l)
    fail(errc::coordinate_mismatch, "collapse carries " + std::to_string(cc.trees.size()) +
                                        " trees but the product space has " + std::to_string(l) +
                                        " coordinates");

  embedding_report r;
  r.coordinates = l;
  for (const auto& e : p.embeddings) {
    r.piece_k = std::max(r.piece_k, e.k);
    r.piece_c = std::max(r.piece_c, e.c);
  }

  const vertex_id realized_count = sp.realized.vertex_count();
  std::vector<int> realized_row;
  std::vector<std::vector<int>> tree_rows(static_cast<std::size_t>(l));
  vertex_id cached = -1;
  for (const auto& [u, v] : select_pairs(realized_count, pairs)) {
    if (u != cached) {
      realized_row = distances_from(sp.realized, u);
      for (int j = 0; j < l; ++j)
        tree_rows[static_cast<std::size_t>(j)] = distances_from(
            cc.trees[static_cast<std::size_t>(j)],
            cc.psi[static_cast<std::size_t>(j)][static_cast<std::size_t>(u)]);
      cached = u;
    }
    const long long dp = realized_row[static_cast<std::size_t>(v)];
    long long maxd = 0;
    long long sum = 0;
    for (int j = 0; j < l; ++j) {
      const long long dj =
          tree_rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(
              cc.psi[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)])];
      if (dj > dp)
        fail(errc::lipschitz_violation,
             "collapse " + std::to_string(j) + " stretches the pair (" + std::to_string(u) + ", " +
                 std::to_string(v) + "): " + std::to_string(dj) + " > " + std::to_string(dp));
      maxd = std::max(maxd, dj);
      sum += dj;
    }
    if (sum < dp)
      fail(errc::non_decreasing_violated,
           "summed coordinate distances drop below the product distance on the pair (" +
               std::to_string(u) + ", " + std::to_string(v) + "): " + std::to_string(sum) + " < " +
               std::to_string(dp));
    if (static_cast<long long>(l) * maxd < dp)
      fail(errc::non_decreasing_violated,
           "scaled sup of coordinate distances drops below the product distance on the pair (" +
               std::to_string(u) + ", " + std::to_string(v) + "): " + std::to_string(l) + " * " +
               std::to_string(maxd) + " < " + std::to_string(dp));
    if (maxd >= dp) ++r.unscaled_hits;
    if (dp > 0)
      r.step_lower =
          std::max(r.step_lower, static_cast<double>(dp) / static_cast<double>(maxd));
    ++r.pairs_checked;
  }

  // Composite run: original realization -> lift -> coordinate trees.
  const vertex_id source_count = p.source.vertex_count();
  if (static_cast<vertex_id>(p.lift.size()) != source_count)
    fail(errc::invalid_argument, "lift table does not cover the source realization");
  std::vector<int> source_row;
  cached = -1;
  for (const auto& [a, b] : select_pairs(source_count, pairs)) {
    if (a != cached) {
      source_row = distances_from(p.source, a);
      for (int j = 0; j < l; ++j)
        tree_rows[static_cast<std::size_t>(j)] = distances_from(
            cc.trees[static_cast<std::size_t>(j)],
            cc.psi[static_cast<std::size_t>(j)][static_cast<std::size_t>(
                p.lift[static_cast<std::size_t>(a)])]);
      cached = a;
    }
    const long long ds = source_row[static_cast<std::size_t>(b)];
    long long maxd = 0;
    for (int j = 0; j < l; ++j)
      maxd = std::max(
          maxd, static_cast<long long>(tree_rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(
                    cc.psi[static_cast<std::size_t>(j)][static_cast<std::size_t>(
                        p.lift[static_cast<std::size_t>(b)])])]));
    if (maxd > ds)
      fail(errc::lipschitz_violation, "the lift expands the source pair (" + std::to_string(a) +
                                          ", " + std::to_string(b) + "): " + std::to_string(maxd) +
                                          " > " + std::to_string(ds));
    if (ds > 0 && maxd == 0)
      fail(errc::non_decreasing_violated, "the lift collapses the distinct source vertices " +
                                              std::to_string(a) + " and " + std::to_string(b));
    if (ds > 0) {
      r.composite_lower =
          std::max(r.composite_lower, static_cast<double>(ds) / static_cast<double>(maxd));
      r.composite_upper =
          std::max(r.composite_upper, static_cast<double>(maxd) / static_cast<double>(ds));
    }
    ++r.lifted_pairs;
  }
  r.passed = true;
  return r;
}

}  // namespace tg
