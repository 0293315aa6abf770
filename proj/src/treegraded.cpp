#include "treegrade/treegraded.hpp"

#include <algorithm>
#include <cstdlib>
#include <queue>
#include <string>
#include <utility>

namespace tg {

namespace {

std::string piece_tag(int i) { return "piece " + std::to_string(i); }

// Rank of `v` inside the sorted id list, or -1.
int rank_in(const std::vector<vertex_id>& items, vertex_id v) {
  auto it = std::lower_bound(items.begin(), items.end(), v);
  if (it == items.end() || *it != v) return -1;
  return static_cast<int>(it - items.begin());
}

}  // namespace

// ---- arc_info ----

std::vector<vertex_id> arc_info::route() const {
  std::vector<vertex_id> out;
  out.reserve(interior.size() + 2);
  out.push_back(from);
  out.insert(out.end(), interior.begin(), interior.end());
  out.push_back(to);
  return out;
}

// ---- tg_point ----

tg_point tg_point::on_piece(int piece, vertex_id original) {
  tg_point p;
  p.piece = piece;
  p.vertex = original;
  return p;
}

tg_point tg_point::on_arc(int arc_piece, long long offset) {
  tg_point p;
  p.arc_piece = arc_piece;
  p.offset = offset;
  return p;
}

// ---- tree_graded_space accessors ----

int tree_graded_space::local_rank(int piece, vertex_id original) const {
  if (piece < 0 || piece >= piece_count())
    fail(errc::invalid_argument, "piece index " + std::to_string(piece) + " out of range");
  const int rank = rank_in(hulls[piece].items(), original);
  if (rank < 0)
    fail(errc::invalid_argument, "vertex " + std::to_string(original) +
                                     " is not in the neighborhood of " + piece_tag(piece));
  return rank;
}

vertex_id tree_graded_space::copy_vertex(int piece, vertex_id original) const {
  return copy_base[piece] + local_rank(piece, original);
}

vertex_id tree_graded_space::resolve(const tg_point& p) const {
  if (p.arc_piece < 0) return copy_vertex(p.piece, p.vertex);
  if (p.arc_piece >= piece_count() || arc_of_piece[p.arc_piece] < 0)
    fail(errc::invalid_argument, "no arc hangs from " + piece_tag(p.arc_piece));
  const arc_info& arc = arcs[arc_of_piece[p.arc_piece]];
  if (p.offset < 0 || p.offset > arc.length)
    fail(errc::invalid_argument, "arc offset " + std::to_string(p.offset) + " outside [0, " +
                                     std::to_string(arc.length) + "]");
  if (p.offset == 0) return arc.from;
  if (p.offset == arc.length) return arc.to;
  return arc.interior[static_cast<std::size_t>(p.offset) - 1];
}

tg_point tree_graded_space::locate(vertex_id realized_id) const {
  if (realized_id < 0 || realized_id >= realized.vertex_count())
    fail(errc::invalid_argument, "realized id " + std::to_string(realized_id) + " out of range");
  const int n = piece_count();
  const vertex_id total_copy =
      copy_base[n - 1] + static_cast<vertex_id>(hulls[n - 1].size());
  if (realized_id < total_copy) {
    const auto it = std::upper_bound(copy_base.begin(), copy_base.end(), realized_id);
    const int piece = static_cast<int>(it - copy_base.begin()) - 1;
    const vertex_id rank = realized_id - copy_base[piece];
    return tg_point::on_piece(piece, hulls[piece].items()[rank]);
  }
  vertex_id base = total_copy;
  for (const arc_info& arc : arcs) {
    const vertex_id count = static_cast<vertex_id>(arc.interior.size());
    if (realized_id < base + count) return tg_point::on_arc(arc.piece, realized_id - base + 1);
    base += count;
  }
  fail(errc::invalid_argument, "realized id " + std::to_string(realized_id) + " unaccounted for");
}

// ---- build ----

tree_graded_space build_tree_graded(const construction_state& st) {
  const metric_graph& g = st.structure.graph;
  const int n = st.structure.piece_count();
  const long long m = st.structure.m;
  if (static_cast<int>(st.basepoints.size()) != n || static_cast<int>(st.geodesics.size()) != n ||
      static_cast<int>(st.levels.size()) != n || static_cast<int>(st.c_points.size()) != n ||
      static_cast<int>(st.parents.size()) != n || st.e_piece < 0 || st.e_piece >= n)
    fail(errc::invalid_argument, "construction state is incomplete");

  tree_graded_space t;
  t.e_piece = st.e_piece;
  t.parents = st.parents;

  // Depths via parent walks; a walk that cannot reach the base in n steps
  // has run into a loop.
  t.depth.assign(n, -1);
  t.depth[st.e_piece] = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> chain;
    int cur = i;
    while (t.depth[cur] < 0) {
      chain.push_back(cur);
      if (static_cast<int>(chain.size()) > n)
        fail(errc::parent_cycle,
             "parent chain from " + piece_tag(i) + " never reaches the base piece");
      const int p = st.parents[cur];
      if (p < 0 || p >= n)
        fail(errc::invalid_argument, "parent of " + piece_tag(cur) + " out of range");
      cur = p;
    }
    int d = t.depth[cur];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) t.depth[*it] = ++d;
  }

  // Piece neighborhoods and their induced copies.
  t.hulls.reserve(n);
  t.piece_graphs.reserve(n);
  t.copy_base.reserve(n);
  vertex_id next_id = 0;
  std::vector<std::pair<vertex_id, vertex_id>> realized_edges;
  for (int i = 0; i < n; ++i) {
    t.hulls.push_back(closed_neighborhood(g, st.structure.piece(i), 4 * m));
    const auto& items = t.hulls.back().items();
    const int size = static_cast<int>(items.size());
    std::vector<std::pair<vertex_id, vertex_id>> local_edges;
    std::vector<std::vector<vertex_id>> local_adj(size);
    for (int a = 0; a < size; ++a) {
      for (vertex_id w : g.neighbors(items[a])) {
        if (w <= items[a]) continue;
        const int b = rank_in(items, w);
        if (b < 0) continue;
        local_edges.emplace_back(a, b);
        local_adj[a].push_back(b);
        local_adj[b].push_back(a);
      }
    }
    // The copy must be connected or the gluing model breaks down.
    std::vector<char> seen(size, 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
      const int a = frontier.front();
      frontier.pop();
      for (int b : local_adj[a])
        if (!seen[b]) {
          seen[b] = 1;
          ++reached;
          frontier.push(b);
        }
    }
    if (reached != size)
      fail(errc::piece_disconnected,
           "the neighborhood of " + piece_tag(i) + " induces a disconnected subgraph");
    t.piece_graphs.emplace_back(size, std::move(local_edges));
    t.copy_base.push_back(next_id);
    std::vector<vertex_id> copy_ids(size);
    for (int a = 0; a < size; ++a) copy_ids[a] = next_id + a;
    t.copy_sets.emplace_back(std::move(copy_ids));
    for (const auto& [a, b] : t.piece_graphs.back().edges())
      realized_edges.emplace_back(next_id + a, next_id + b);
    next_id += size;
  }

  // Gluing arcs, one per non-base piece, in piece order.
  t.arc_of_piece.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (i == st.e_piece) continue;
    const int lv = st.levels[i];
    const long long length =
        static_cast<long long>(st.geodesics[i].length()) - static_cast<long long>(lv - 1) * st.r;
    if (lv < 1 || length < 1)
      fail(errc::invalid_argument, "arc length for " + piece_tag(i) + " must be positive");
    arc_info arc;
    arc.piece = i;
    arc.child_attach = st.basepoints[i];
    arc.parent_attach = st.c_points[i];
    arc.length = length;
    if (rank_in(t.hulls[i].items(), arc.child_attach) < 0)
      fail(errc::invalid_argument,
           "basepoint of " + piece_tag(i) + " escapes its own neighborhood");
    if (rank_in(t.hulls[st.parents[i]].items(), arc.parent_attach) < 0)
      fail(errc::glue_violated, "attach point of " + piece_tag(i) +
                                    " is missing from the neighborhood of " +
                                    piece_tag(st.parents[i]));
    arc.from = t.copy_base[i] + rank_in(t.hulls[i].items(), arc.child_attach);
    arc.to = t.copy_base[st.parents[i]] + rank_in(t.hulls[st.parents[i]].items(), arc.parent_attach);
    vertex_id prev = arc.from;
    for (long long k = 1; k < length; ++k) {
      arc.interior.push_back(next_id);
      realized_edges.emplace_back(prev, next_id);
      prev = next_id;
      ++next_id;
    }
    realized_edges.emplace_back(prev, arc.to);
    t.arc_of_piece[i] = static_cast<int>(t.arcs.size());
    t.arcs.push_back(std::move(arc));
  }

  t.realized = metric_graph(next_id, std::move(realized_edges));
  std::vector<std::pair<vertex_id, vertex_id>> tree_edges;
  for (int i = 0; i < n; ++i)
    if (i != st.e_piece) tree_edges.emplace_back(i, st.parents[i]);
  t.underlying_tree = metric_graph(n, std::move(tree_edges));
  return t;
}

// ---- distance oracle ----

const std::vector<int>& transit_oracle::piece_row(int piece, vertex_id original) {
  const auto key = std::make_pair(piece, original);
  auto it = rows_.find(key);
  if (it != rows_.end()) return it->second;
  auto row = distances_from(t_->piece_graphs[piece], t_->local_rank(piece, original));
  return rows_.emplace(key, std::move(row)).first->second;
}

long long transit_oracle::copy_distance(int pa, vertex_id va, int pb, vertex_id vb) {
  long long cost = 0;
  while (pa != pb) {
    // Climb the deeper side: walk to the arc inside the current copy, then
    // cross the whole arc into the parent.
    const bool climb_a = t_->depth[pa] >= t_->depth[pb];
    int& p = climb_a ? pa : pb;
    vertex_id& v = climb_a ? va : vb;
    const arc_info& arc = t_->arcs[t_->arc_of_piece[p]];
    cost += piece_row(p, v)[t_->local_rank(p, arc.child_attach)] + arc.length;
    v = arc.parent_attach;
    p = t_->parents[p];
  }
  return cost + piece_row(pa, va)[t_->local_rank(pa, vb)];
}

long long transit_oracle::distance(tg_point a, tg_point b) {
  // Arc endpoints are piece points in disguise; normalize them first so
  // only true interior offsets remain on arcs.
  const auto normalize = [this](tg_point p) {
    if (p.arc_piece < 0) {
      t_->local_rank(p.piece, p.vertex);  // validate
      return p;
    }
    if (p.arc_piece >= t_->piece_count() || t_->arc_of_piece[p.arc_piece] < 0)
      fail(errc::invalid_argument, "no arc hangs from " + piece_tag(p.arc_piece));
    const arc_info& arc = t_->arcs[t_->arc_of_piece[p.arc_piece]];
    if (p.offset < 0 || p.offset > arc.length)
      fail(errc::invalid_argument, "arc offset " + std::to_string(p.offset) + " outside [0, " +
                                       std::to_string(arc.length) + "]");
    if (p.offset == 0) return tg_point::on_piece(arc.piece, arc.child_attach);
    if (p.offset == arc.length)
      return tg_point::on_piece(t_->parents[arc.piece], arc.parent_attach);
    return p;
  };
  a = normalize(a);
  b = normalize(b);
  if (a.arc_piece >= 0 && a.arc_piece == b.arc_piece) return std::llabs(a.offset - b.offset);
  if (a.arc_piece >= 0) {
    // Interior arc points leave through one of the two ends; the interior
    // vertices have degree two, so the cheaper exit is exact.
    const arc_info& arc = t_->arcs[t_->arc_of_piece[a.arc_piece]];
    const tg_point child = tg_point::on_piece(arc.piece, arc.child_attach);
    const tg_point parent = tg_point::on_piece(t_->parents[arc.piece], arc.parent_attach);
    return std::min(a.offset + distance(child, b), (arc.length - a.offset) + distance(parent, b));
  }
  if (b.arc_piece >= 0) return distance(b, a);
  return copy_distance(a.piece, a.vertex, b.piece, b.vertex);
}

long long tg_distance(const tree_graded_space& t, const tg_point& a, const tg_point& b) {
  transit_oracle oracle(t);
  return oracle.distance(a, b);
}

// ---- verification ----

tree_graded_report verify_tree_graded(const tree_graded_space& t) {
  tree_graded_report r;
  const auto flag = [&r](bool& field, const std::string& detail) {
    field = false;
    r.passed = false;
    if (r.detail.empty()) r.detail = detail;
  };

  // (a) distinct pieces-with-arcs meet in at most one vertex.
  std::vector<std::pair<std::string, point_set>> families;
  for (std::size_t i = 0; i < t.copy_sets.size(); ++i)
    families.emplace_back("copy of " + piece_tag(static_cast<int>(i)), t.copy_sets[i]);
  for (const arc_info& arc : t.arcs)
    families.emplace_back("arc of " + piece_tag(arc.piece), point_set(arc.route()));
  for (std::size_t i = 0; i < families.size() && r.single_point_gluing; ++i)
    for (std::size_t j = i + 1; j < families.size(); ++j) {
      const std::size_t shared = families[i].second.set_and(families[j].second).size();
      if (shared > 1) {
        flag(r.single_point_gluing, families[i].first + " and " + families[j].first + " share " +
                                        std::to_string(shared) + " vertices");
        break;
      }
    }

  // (b) the underlying tree is acyclic (it is connected by construction).
  if (t.underlying_tree.edge_count() + 1 !=
      static_cast<std::size_t>(t.underlying_tree.vertex_count()))
    flag(r.underlying_acyclic,
         "underlying tree has " + std::to_string(t.underlying_tree.edge_count()) + " edges on " +
             std::to_string(t.underlying_tree.vertex_count()) + " vertices");

  // (c) every simple cycle stays inside one piece copy.  Fundamental
  // cycles against one spanning tree generate the cycle space, and copies
  // are vertex-disjoint, so checking them is enough.
  const metric_graph& g = t.realized;
  std::vector<vertex_id> parent(g.vertex_count(), -1);
  std::vector<int> depth(g.vertex_count(), -1);
  std::queue<vertex_id> frontier;
  frontier.push(0);
  depth[0] = 0;
  while (!frontier.empty()) {
    const vertex_id u = frontier.front();
    frontier.pop();
    for (vertex_id w : g.neighbors(u))
      if (depth[w] < 0) {
        depth[w] = depth[u] + 1;
        parent[w] = u;
        frontier.push(w);
      }
  }
  const auto in_one_copy = [&t](const std::vector<vertex_id>& cycle) {
    for (const point_set& copy : t.copy_sets) {
      bool all = true;
      for (vertex_id v : cycle)
        if (!copy.contains(v)) {
          all = false;
          break;
        }
      if (all) return true;
    }
    return false;
  };
  for (const auto& [u, w] : g.edges()) {
    if (!r.cycles_in_pieces) break;
    if (parent[w] == u || parent[u] == w) continue;  // spanning-tree edge
    std::vector<vertex_id> cycle;
    vertex_id x = u;
    vertex_id y = w;
    while (depth[x] > depth[y]) {
      cycle.push_back(x);
      x = parent[x];
    }
    std::vector<vertex_id> tail;
    while (depth[y] > depth[x]) {
      tail.push_back(y);
      y = parent[y];
    }
    while (x != y) {
      cycle.push_back(x);
      tail.push_back(y);
      x = parent[x];
      y = parent[y];
    }
    cycle.push_back(x);
    cycle.insert(cycle.end(), tail.rbegin(), tail.rend());
    if (!in_one_copy(cycle))
      flag(r.cycles_in_pieces, "cycle through edge {" + std::to_string(u) + ", " +
                                   std::to_string(w) + "} leaves every piece copy");
  }
  return r;
}

// ---- collapse ----

collapse_map collapse(const tree_graded_space& t, const construction_state& st) {
  const metric_graph& g = st.structure.graph;
  collapse_map phi;
  phi.image.assign(t.realized.vertex_count(), -1);
  for (int i = 0; i < t.piece_count(); ++i) {
    const auto& items = t.hulls[i].items();
    for (std::size_t k = 0; k < items.size(); ++k) phi.image[t.copy_base[i] + k] = items[k];
  }
  for (const arc_info& arc : t.arcs) {
    const auto& geo = st.geodesics[arc.piece].vertices;
    if (geo.size() <= arc.interior.size() + 1)
      fail(errc::lipschitz_violation,
           "geodesic for " + piece_tag(arc.piece) + " is shorter than its arc");
    for (std::size_t k = 0; k < arc.interior.size(); ++k) phi.image[arc.interior[k]] = geo[k + 1];
  }
  for (const auto& [u, w] : t.realized.edges()) {
    const vertex_id a = phi.image[u];
    const vertex_id b = phi.image[w];
    if (a == b || g.has_edge(a, b)) continue;
    fail(errc::lipschitz_violation, "realized edge {" + std::to_string(u) + ", " +
                                        std::to_string(w) + "} maps to the non-adjacent pair {" +
                                        std::to_string(a) + ", " + std::to_string(b) + "}");
  }
  return phi;
}

// ---- distortion ----

distortion_report measure_distortion(const tree_graded_space& t, const construction_state& st,
                                     const sample_spec& pairs) {
  const metric_graph& g = st.structure.graph;
  const collapse_map phi = collapse(t, st);
  distortion_report report;
  report.additive_bound = 18 * st.r + 672 * st.structure.m;

  std::map<vertex_id, std::vector<int>> source_rows;
  const auto source_row = [&](vertex_id v) -> const std::vector<int>& {
    auto it = source_rows.find(v);
    if (it != source_rows.end()) return it->second;
    return source_rows.emplace(v, distances_from(g, v)).first->second;
  };

  std::vector<int> realized_row;
  vertex_id row_source = -1;
  for (const auto& [u, v] : select_pairs(t.realized.vertex_count(), pairs)) {
    if (u != row_source) {
      realized_row = distances_from(t.realized, u);
      row_source = u;
    }
    const long long dt = realized_row[v];
    const long long dx = source_row(phi.image[u])[phi.image[v]];
    const auto pair_tag = [&] {
      return "pair {" + std::to_string(u) + ", " + std::to_string(v) + "}";
    };
    if (dx > dt)
      fail(errc::bound_violated, pair_tag() + ": collapse expands distance " + std::to_string(dt) +
                                     " to " + std::to_string(dx));
    if (dt > 2 * dx + report.additive_bound)
      fail(errc::bound_violated, pair_tag() + ": distance " + std::to_string(dt) +
                                     " exceeds twice " + std::to_string(dx) + " plus " +
                                     std::to_string(report.additive_bound));
    const long long excess = dt - dx;
    report.max_excess = std::max(report.max_excess, excess);
    ++report.excess_histogram[excess];
    ++report.pairs_checked;
  }
  report.bound_satisfied = true;
  return report;
}

}  // namespace tg
