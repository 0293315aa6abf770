#include "treegrade/construction.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <tuple>

namespace tg {

namespace {

long long piece_distance(const std::vector<int>& dist, const point_set& piece) {
  long long best = std::numeric_limits<long long>::max();
  for (vertex_id v : piece) best = std::min<long long>(best, dist[static_cast<std::size_t>(v)]);
  return best;
}

// Structural defects in a handed-over chain count as "no usable chain", not
// as a hard failure: the search fallback may still produce a good one.
bool chain_verifies(const rbp_structure& s, const bottleneck_chain& chain) {
  try {
    return verify_bottleneck_chain(s, chain).ok;
  } catch (const error& err) {
    if (err.code() == errc::chain_malformed) return false;
    throw;
  }
}

}  // namespace

// ---- begin_construction ----

construction_state begin_construction(const rbp_structure& s, vertex_id e, long long r) {
  s.decomposition.validate(s.graph);
  if (e < 0 || e >= s.graph.vertex_count())
    fail(errc::invalid_argument, "basepoint vertex " + std::to_string(e) + " out of range");

  construction_state st;
  st.structure = s;
  st.r = r == 0 ? 160 * s.m : r;
  if (st.r <= 0 || st.r % s.m != 0)
    fail(errc::invalid_argument, "stratum width " + std::to_string(st.r) +
                                     " is not a positive multiple of M = " + std::to_string(s.m));

  st.e = e;
  for (int i = 0; i < s.piece_count(); ++i) {
    if (!s.piece(i).contains(e)) continue;
    if (st.e_piece >= 0)
      fail(errc::basepoint_not_unique, "basepoint " + std::to_string(e) + " lies in pieces " +
                                           std::to_string(st.e_piece) + " and " + std::to_string(i));
    st.e_piece = i;
  }
  st.dist_e = distances_from(s.graph, e);
  st.trace.push_back({"basepoint-unique", true,
                      "e = " + std::to_string(e) + " in piece " + std::to_string(st.e_piece)});
  return st;
}

// ---- compute_basepoints ----

void compute_basepoints(construction_state& st) {
  const rbp_structure& s = st.structure;
  const int n = s.piece_count();
  st.basepoints.assign(static_cast<std::size_t>(n), -1);
  st.chains.assign(static_cast<std::size_t>(n), {});
  st.geodesics.assign(static_cast<std::size_t>(n), {});
  st.basepoints[static_cast<std::size_t>(st.e_piece)] = st.e;
  st.geodesics[static_cast<std::size_t>(st.e_piece)] = path_witness{{st.e}};

  int searched = 0;
  for (int i = 0; i < n; ++i) {
    if (i == st.e_piece) continue;
    const long long bound = piece_distance(st.dist_e, s.piece(i)) + s.m;
    auto first_witness_ok = [&](const bottleneck_chain& chain) {
      return st.dist_e[static_cast<std::size_t>(chain.witnesses.front())] <= bound;
    };

    std::optional<bottleneck_chain> chain = s.chain_for(i, st.e_piece);
    if (chain && (!chain_verifies(s, *chain) || !first_witness_ok(*chain))) chain.reset();
    if (!chain) {
      chain = search_certificate(s, i, st.e_piece, s.m);
      if (chain) ++searched;
    }
    if (!chain)
      fail(errc::missing_certificate,
           "no verifiable chain from piece " + std::to_string(i) + " to the base piece");
    if (!first_witness_ok(*chain))
      fail(errc::basepoint_bound_violated,
           "piece " + std::to_string(i) + ": d(e, e_i) = " +
               std::to_string(st.dist_e[static_cast<std::size_t>(chain->witnesses.front())]) +
               " exceeds d(e, X_i) + M = " + std::to_string(bound));

    const vertex_id e_i = chain->witnesses.front();
    st.basepoints[static_cast<std::size_t>(i)] = e_i;
    st.chains[static_cast<std::size_t>(i)] = std::move(*chain);
    st.geodesics[static_cast<std::size_t>(i)] = canonical_geodesic(s.graph, e_i, st.e);
  }
  st.trace.push_back({"basepoint-bound", true,
                      std::to_string(n - 1) + " basepoints fixed, " + std::to_string(searched) +
                          " via fresh search"});
}

// ---- compute_strata ----

void compute_strata(construction_state& st) {
  const int n = st.structure.piece_count();
  st.levels.assign(static_cast<std::size_t>(n), 0);
  int max_level = 0;
  for (int i = 0; i < n; ++i) {
    if (i == st.e_piece) continue;
    const long long d = st.dist_e[static_cast<std::size_t>(st.basepoints[static_cast<std::size_t>(i)])];
    if (d == 0)
      fail(errc::base_stratum_not_singleton,
           "piece " + std::to_string(i) + " has its basepoint at e itself");
    const int level = static_cast<int>((d + st.r - 1) / st.r);
    st.levels[static_cast<std::size_t>(i)] = level;
    max_level = std::max(max_level, level);
  }
  st.strata.assign(static_cast<std::size_t>(max_level) + 1, {});
  for (int i = 0; i < n; ++i)
    st.strata[static_cast<std::size_t>(st.levels[static_cast<std::size_t>(i)])].push_back(i);

  std::ostringstream sizes;
  for (std::size_t level = 0; level < st.strata.size(); ++level)
    sizes << (level ? " " : "") << st.strata[level].size();
  st.trace.push_back({"base-stratum-singleton", true, "level sizes: " + sizes.str()});
}

// ---- compute_c_points ----

void compute_c_points(construction_state& st) {
  const int n = st.structure.piece_count();
  st.c_points.assign(static_cast<std::size_t>(n), st.e);
  for (int i = 0; i < n; ++i) {
    if (i == st.e_piece) continue;
    const path_witness& g_i = st.geodesics[static_cast<std::size_t>(i)];
    const long long from_e = (st.levels[static_cast<std::size_t>(i)] - 1) * st.r;
    // g_i runs e_i -> e, so the vertex at distance from_e off the far end.
    st.c_points[static_cast<std::size_t>(i)] =
        g_i.vertices[g_i.length() - static_cast<std::size_t>(from_e)];
  }
}

// ---- level relation and equivalence ----

level_relation compute_level_relation(const construction_state& st, int level) {
  const rbp_structure& s = st.structure;
  level_relation rel;
  if (level < 0 || level > st.max_level()) return rel;
  rel.members = st.strata[static_cast<std::size_t>(level)];
  const std::size_t count = rel.members.size();
  rel.related.assign(count, std::vector<char>(count, 0));
  for (std::size_t a = 0; a < count; ++a) rel.related[a][a] = 1;
  if (level == 0 || count < 2) return rel;

  const long long inner = static_cast<long long>(level - 1) * st.r;
  const point_set ball = open_ball(s.graph, st.e, inner + 11 * s.m);

  for (int k = 0; k < s.piece_count(); ++k) {
    if (st.levels[static_cast<std::size_t>(k)] >= level) continue;
    const point_set hull = closed_neighborhood(s.graph, s.piece(k), 4 * s.m);
    const separation_labels labels = label_components_minus(s.graph, ball.set_minus(hull));

    std::vector<std::vector<int>> comps(count);
    for (std::size_t a = 0; a < count; ++a) {
      for (vertex_id v : s.piece(rel.members[a])) {
        const int c = labels.comp[static_cast<std::size_t>(v)];
        if (c >= 0) comps[a].push_back(c);
      }
      std::sort(comps[a].begin(), comps[a].end());
      comps[a].erase(std::unique(comps[a].begin(), comps[a].end()), comps[a].end());
    }
    for (std::size_t a = 0; a < count; ++a) {
      for (std::size_t b = a + 1; b < count; ++b) {
        if (rel.related[a][b]) continue;
        const bool meet = !comps[a].empty() && !comps[b].empty() &&
                          std::find_first_of(comps[a].begin(), comps[a].end(), comps[b].begin(),
                                             comps[b].end()) != comps[a].end();
        if (meet) rel.related[a][b] = rel.related[b][a] = 1;
      }
    }
  }
  return rel;
}

std::vector<std::vector<int>> level_equivalence(const construction_state& st, int level) {
  const level_relation rel = compute_level_relation(st, level);
  const std::size_t count = rel.members.size();
  for (std::size_t a = 0; a < count; ++a)
    for (std::size_t b = 0; b < count; ++b)
      for (std::size_t c = 0; c < count; ++c)
        if (rel.related[a][b] && rel.related[b][c] && !rel.related[a][c])
          fail(errc::not_transitive, "pieces " + std::to_string(rel.members[a]) + " ~ " +
                                         std::to_string(rel.members[b]) + " ~ " +
                                         std::to_string(rel.members[c]) +
                                         " but the outer pair is unrelated");

  std::vector<std::vector<int>> classes;
  std::vector<char> placed(count, 0);
  for (std::size_t a = 0; a < count; ++a) {
    if (placed[a]) continue;
    std::vector<int> cls;
    for (std::size_t b = a; b < count; ++b) {
      if (rel.related[a][b]) {
        cls.push_back(rel.members[b]);
        placed[b] = 1;
      }
    }
    classes.push_back(std::move(cls));
  }
  return classes;
}

void compute_classes(construction_state& st) {
  st.classes.assign(st.strata.size(), {});
  for (int level = 0; level <= st.max_level(); ++level) {
    st.classes[static_cast<std::size_t>(level)] = level_equivalence(st, level);
    st.trace.push_back({"level-" + std::to_string(level) + "-classes", true,
                        std::to_string(st.classes[static_cast<std::size_t>(level)].size()) +
                            " classes over " +
                            std::to_string(st.strata[static_cast<std::size_t>(level)].size()) +
                            " pieces"});
  }
}

// ---- parent_map ----

void parent_map(construction_state& st) {
  const rbp_structure& s = st.structure;
  const int n = s.piece_count();
  st.parents.assign(static_cast<std::size_t>(n), st.e_piece);
  st.parents[static_cast<std::size_t>(st.e_piece)] = st.e_piece;

  std::vector<std::vector<int>> pieces_of(static_cast<std::size_t>(s.graph.vertex_count()));
  for (int k = 0; k < n; ++k)
    for (vertex_id v : s.piece(k)) pieces_of[static_cast<std::size_t>(v)].push_back(k);

  int containments = 0;
  for (int level = 1; level <= st.max_level(); ++level) {
    const long long eligible_from = static_cast<long long>(level - 1) * st.r - s.m;
    for (const std::vector<int>& cls : st.classes[static_cast<std::size_t>(level)]) {
      // Lexicographic best over (-d(e, w), k, d(e, e_k)): the witness
      // farthest from e wins, then the smallest piece id.
      std::optional<std::tuple<long long, int, long long>> best;
      for (int member : cls) {
        for (vertex_id w : st.chains[static_cast<std::size_t>(member)].witnesses) {
          const long long dw = st.dist_e[static_cast<std::size_t>(w)];
          if (dw < eligible_from) continue;
          for (int k : pieces_of[static_cast<std::size_t>(w)]) {
            if (st.levels[static_cast<std::size_t>(k)] >= level) continue;
            const std::tuple<long long, int, long long> candidate{
                -dw, k, st.dist_e[static_cast<std::size_t>(st.basepoints[static_cast<std::size_t>(k)])]};
            if (!best || candidate < *best) best = candidate;
          }
        }
      }
      int parent = st.e_piece;
      if (best) {
        parent = std::get<1>(*best);
      } else {
        st.trace.push_back({"parent-fallback", true,
                            "class of piece " + std::to_string(cls.front()) + " at level " +
                                std::to_string(level) + " has no eligible witness; glued to base"});
      }

      const std::vector<int> dist_parent = distances_from(s.graph, s.piece(parent));
      for (int member : cls) {
        const vertex_id c_m = st.c_points[static_cast<std::size_t>(member)];
        if (dist_parent[static_cast<std::size_t>(c_m)] > 4 * s.m)
          fail(errc::glue_violated,
               "c-point of piece " + std::to_string(member) + " misses N_4M of parent piece " +
                   std::to_string(parent));
        st.parents[static_cast<std::size_t>(member)] = parent;
        ++containments;
      }
    }
  }
  st.trace.push_back({"glue-containment", true,
                      std::to_string(containments) + " c-points inside their parent neighborhoods"});
}

// ---- build_construction ----

construction_state build_construction(const rbp_structure& s, vertex_id e, long long r) {
  construction_state st = begin_construction(s, e, r);
  compute_basepoints(st);
  compute_strata(st);
  compute_c_points(st);
  compute_classes(st);
  parent_map(st);
  return st;
}

// ---- slack_geodesic ----

slack_geodesic_result slack_geodesic(const construction_state& st, vertex_id x, int i) {
  const rbp_structure& s = st.structure;
  if (i < 0 || i >= s.piece_count()) fail(errc::invalid_argument, "piece index out of range");
  if (x < 0 || x >= s.graph.vertex_count())
    fail(errc::invalid_argument, "vertex " + std::to_string(x) + " out of range");

  const std::vector<int> from_x = distances_from(s.graph, x);
  vertex_id nearest = -1;
  for (vertex_id v : s.piece(i)) {
    if (nearest < 0 || from_x[static_cast<std::size_t>(v)] < from_x[static_cast<std::size_t>(nearest)])
      nearest = v;
  }
  if (from_x[static_cast<std::size_t>(nearest)] > 4 * s.m)
    fail(errc::invalid_argument, "vertex " + std::to_string(x) + " is not within 4M of piece " +
                                     std::to_string(i));

  const vertex_id e_i = st.basepoints[static_cast<std::size_t>(i)];
  const path_witness leg1 = canonical_geodesic(s.graph, x, nearest);
  const path_witness leg2 = canonical_geodesic(s.graph, nearest, e_i);
  const path_witness& g_i = st.geodesics[static_cast<std::size_t>(i)];

  slack_geodesic_result out;
  out.path.vertices = leg1.vertices;
  out.path.vertices.insert(out.path.vertices.end(), leg2.vertices.begin() + 1, leg2.vertices.end());
  out.path.vertices.insert(out.path.vertices.end(), g_i.vertices.begin() + 1, g_i.vertices.end());
  out.slack = static_cast<long long>(out.path.length()) - st.dist_e[static_cast<std::size_t>(x)];
  if (out.slack > 10 * s.m)
    fail(errc::slack_exceeded, "detour through e_" + std::to_string(i) + " overshoots by " +
                                   std::to_string(out.slack) + " > 10M");

  const point_set hull = closed_neighborhood(s.graph, s.piece(i), 4 * s.m);
  const point_set ball =
      open_ball(s.graph, st.e, static_cast<long long>(st.levels[static_cast<std::size_t>(i)]) * st.r);
  for (vertex_id v : out.path.vertices) {
    if (!hull.contains(v) && !ball.contains(v))
      fail(errc::slack_exceeded, "detour vertex " + std::to_string(v) +
                                     " leaves the piece neighborhood and the stratum ball");
  }
  return out;
}

// ---- check_separation ----

std::optional<std::pair<int, int>> check_separation(const construction_state& st) {
  const rbp_structure& s = st.structure;
  for (int i = 0; i < s.piece_count(); ++i) {
    if (i == st.e_piece) continue;
    const point_set ball =
        open_ball(s.graph, st.basepoints[static_cast<std::size_t>(i)], 4 * s.m);
    const separation_labels labels = label_components_minus(s.graph, ball);
    const long long d_i = st.dist_e[static_cast<std::size_t>(st.basepoints[static_cast<std::size_t>(i)])];
    for (int j = 0; j < s.piece_count(); ++j) {
      if (j == i) continue;
      const long long d_j =
          st.dist_e[static_cast<std::size_t>(st.basepoints[static_cast<std::size_t>(j)])];
      if (d_i < d_j) continue;
      if (!blocks_all_paths(s.graph, s.piece(i), s.piece(j), ball, labels).blocked)
        return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

}  // namespace tg
