#include "treegrade/rbp.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <mutex>
#include <queue>
#include <sstream>

#include "treegrade/errors.hpp"
#include "treegrade/parallel.hpp"

namespace tg {

// ---- decomposition ----

void piece_decomposition::validate(const metric_graph& g) const {
  if (pieces.empty()) fail(errc::invalid_argument, "decomposition has no pieces");
  const int p = static_cast<int>(pieces.size());
  if (base_piece < 0 || base_piece >= p)
    fail(errc::invalid_argument, "base piece index out of range");
  std::vector<char> covered(static_cast<std::size_t>(g.vertex_count()), 0);
  for (int i = 0; i < p; ++i) {
    if (pieces[i].empty())
      fail(errc::invalid_argument, "piece " + std::to_string(i) + " is empty");
    for (vertex_id v : pieces[i]) {
      if (v < 0 || v >= g.vertex_count())
        fail(errc::invalid_argument,
             "piece " + std::to_string(i) + " contains out-of-range vertex " +
                 std::to_string(v));
      covered[static_cast<std::size_t>(v)] = 1;
    }
  }
  for (vertex_id v = 0; v < g.vertex_count(); ++v)
    if (!covered[static_cast<std::size_t>(v)])
      fail(errc::invalid_argument,
           "pieces do not cover vertex " + std::to_string(v));
}

// ---- chains ----

bottleneck_chain bottleneck_chain::reversed() const {
  bottleneck_chain r;
  r.source = target;
  r.target = source;
  r.piece_indices.assign(piece_indices.rbegin(), piece_indices.rend());
  r.witnesses.assign(witnesses.rbegin(), witnesses.rend());
  return r;
}

std::optional<bottleneck_chain> rbp_structure::chain_for(int i, int j) const {
  auto it = certificates.find({std::min(i, j), std::max(i, j)});
  if (it == certificates.end()) return std::nullopt;
  if (it->second.source == i && it->second.target == j) return it->second;
  return it->second.reversed();
}

void rbp_structure::store_chain(bottleneck_chain chain) {
  if (chain.source == chain.target)
    fail(errc::chain_malformed, "chain source equals target");
  if (chain.source > chain.target) chain = chain.reversed();
  certificates[{chain.source, chain.target}] = std::move(chain);
}

const char* pair_verdict_name(pair_verdict v) {
  switch (v) {
    case pair_verdict::verified: return "verified";
    case pair_verdict::refuted: return "refuted";
    case pair_verdict::unknown: return "unknown";
  }
  return "unknown";
}

// ---- witness bookkeeping ----

namespace {

// Shared per-structure state: candidate witnesses (vertices in some
// pairwise piece intersection), their open balls at the working scale, and
// memoized component labelings of the graph minus each ball.  Balls recur
// across many pair checks, so labeling once per witness pays off.
struct witness_context {
  std::vector<vertex_id> candidates;
  std::map<vertex_id, point_set> balls;
  std::map<vertex_id, separation_labels> labels;

  void prepare(const metric_graph& g, const std::vector<point_set>& pieces,
               long long m) {
    point_set all;
    const int p = static_cast<int>(pieces.size());
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j)
        all = all.set_or(pieces[i].set_and(pieces[j]));
    candidates.assign(all.begin(), all.end());
    for (vertex_id w : candidates) {
      point_set ball = open_ball(g, w, m);
      labels.emplace(w, label_components_minus(g, ball));
      balls.emplace(w, std::move(ball));
    }
  }

  bool has(vertex_id w) const { return balls.count(w) != 0; }
};

chain_check check_chain_impl(const rbp_structure& s, const bottleneck_chain& chain,
                             const witness_context* ctx) {
  const auto& g = s.graph;
  const int p = s.piece_count();
  const auto& idx = chain.piece_indices;
  const auto& wit = chain.witnesses;
  if (idx.size() < 2 || wit.size() + 1 != idx.size())
    fail(errc::chain_malformed, "chain needs s+1 piece indices and s witnesses");
  if (idx.front() != chain.source || idx.back() != chain.target)
    fail(errc::chain_malformed, "chain endpoints disagree with source/target");
  if (chain.source == chain.target)
    fail(errc::chain_malformed, "chain source equals target");
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || idx[r] >= p)
      fail(errc::chain_malformed,
           "piece index out of range at position " + std::to_string(r));
    if (r + 1 < idx.size() && idx[r] == idx[r + 1])
      fail(errc::chain_malformed,
           "consecutive equal piece indices at position " + std::to_string(r));
  }
  for (std::size_t r = 0; r < wit.size(); ++r) {
    vertex_id w = wit[r];
    if (w < 0 || w >= g.vertex_count())
      fail(errc::chain_malformed, "witness out of range at position " + std::to_string(r));
    if (!s.piece(idx[r]).contains(w) || !s.piece(idx[r + 1]).contains(w))
      fail(errc::chain_malformed,
           "witness " + std::to_string(w) + " at position " + std::to_string(r) +
           " does not lie in the intersection of its adjacent pieces");
  }

  const auto& src = s.piece(chain.source);
  const auto& tgt = s.piece(chain.target);
  for (std::size_t r = 0; r < wit.size(); ++r) {
    vertex_id w = wit[r];
    blocks_result b;
    if (ctx != nullptr && ctx->has(w))
      b = blocks_all_paths(g, src, tgt, ctx->balls.at(w), ctx->labels.at(w));
    else
      b = blocks_all_paths(g, src, tgt, open_ball(g, w, s.m));
    if (!b.blocked) {
      chain_check out;
      out.ok = false;
      out.failed_witness = static_cast<int>(r);
      out.avoiding_path = b.avoiding_path;
      return out;
    }
  }
  chain_check out;
  out.ok = true;
  return out;
}

std::optional<bottleneck_chain> search_impl(const rbp_structure& s, int i, int j,
                                            const witness_context& ctx,
                                            const std::vector<int>& dist_i,
                                            const std::vector<std::vector<int>>& pieces_of) {
  const auto& g = s.graph;
  const auto& src = s.piece(i);
  const auto& tgt = s.piece(j);

  // Separating candidates, ordered by distance from X_i, ties by id.
  std::vector<vertex_id> seps;
  for (vertex_id w : ctx.candidates) {
    blocks_result b = blocks_all_paths(g, src, tgt, ctx.balls.at(w), ctx.labels.at(w));
    if (b.blocked) seps.push_back(w);
  }
  std::sort(seps.begin(), seps.end(), [&](vertex_id a, vertex_id b) {
    int da = dist_i[static_cast<std::size_t>(a)];
    int db = dist_i[static_cast<std::size_t>(b)];
    return da != db ? da < db : a < b;
  });
  if (seps.empty()) return std::nullopt;

  // Thread separators into a chain: a state (w, p) means witness w has been
  // placed with p as the piece that follows it (so w lies in X_p).  The
  // first witness follows piece i; a state whose next piece is j completes
  // a chain.  Breadth-first search yields the fewest witnesses.
  const int p_count = s.piece_count();
  const int ns = static_cast<int>(seps.size());
  std::vector<int> rank(static_cast<std::size_t>(g.vertex_count()), -1);
  for (int a = 0; a < ns; ++a) rank[static_cast<std::size_t>(seps[a])] = a;

  auto state_id = [&](int sep, int piece) { return sep * p_count + piece; };
  std::vector<int> parent(static_cast<std::size_t>(ns) * p_count, -2);  // -2 unseen, -1 start
  std::queue<int> queue;

  int accept = -1;
  for (int a = 0; a < ns && accept < 0; ++a) {
    vertex_id w = seps[a];
    if (!src.contains(w)) continue;
    for (int piece : pieces_of[static_cast<std::size_t>(w)]) {
      if (piece == i) continue;
      int st = state_id(a, piece);
      if (parent[static_cast<std::size_t>(st)] != -2) continue;
      parent[static_cast<std::size_t>(st)] = -1;
      if (piece == j) { accept = st; break; }
      queue.push(st);
    }
  }
  while (accept < 0 && !queue.empty()) {
    int st = queue.front();
    queue.pop();
    int piece = st % p_count;
    for (int a = 0; a < ns && accept < 0; ++a) {
      vertex_id v = seps[a];
      if (!s.piece(piece).contains(v)) continue;
      for (int next : pieces_of[static_cast<std::size_t>(v)]) {
        if (next == piece) continue;
        int st2 = state_id(a, next);
        if (parent[static_cast<std::size_t>(st2)] != -2) continue;
        parent[static_cast<std::size_t>(st2)] = st;
        if (next == j) { accept = st2; break; }
        queue.push(st2);
      }
    }
  }
  if (accept < 0) return std::nullopt;

  bottleneck_chain chain;
  chain.source = i;
  chain.target = j;
  std::vector<int> states;
  for (int st = accept; st != -1; st = parent[static_cast<std::size_t>(st)])
    states.push_back(st);
  std::reverse(states.begin(), states.end());
  chain.piece_indices.push_back(i);
  for (int st : states) {
    chain.witnesses.push_back(seps[static_cast<std::size_t>(st / p_count)]);
    chain.piece_indices.push_back(st % p_count);
  }
  return chain;
}

}  // namespace

// ---- verification ----

chain_check verify_bottleneck_chain(const rbp_structure& s, const bottleneck_chain& chain) {
  if (s.m < 1) fail(errc::invalid_argument, "scale constant must be at least 1");
  return check_chain_impl(s, chain, nullptr);
}

std::optional<bottleneck_chain> search_certificate(const rbp_structure& s, int i, int j,
                                                   long long m) {
  if (m < 1) fail(errc::invalid_argument, "scale constant must be at least 1");
  const int p = s.piece_count();
  if (i < 0 || i >= p || j < 0 || j >= p || i == j)
    fail(errc::invalid_argument, "bad piece pair");
  rbp_structure at_scale = s;
  at_scale.m = m;
  witness_context ctx;
  ctx.prepare(s.graph, s.decomposition.pieces, m);
  std::vector<int> dist_i = distances_from(s.graph, s.piece(i));
  std::vector<std::vector<int>> pieces_of(static_cast<std::size_t>(s.graph.vertex_count()));
  for (int k = 0; k < p; ++k)
    for (vertex_id v : s.piece(k)) pieces_of[static_cast<std::size_t>(v)].push_back(k);
  return search_impl(at_scale, i, j, ctx, dist_i, pieces_of);
}

verification_report verify_rbp(const rbp_structure& s, const sample_spec& pairs,
                               int threads) {
  s.decomposition.validate(s.graph);
  if (s.m < 1) fail(errc::invalid_argument, "scale constant must be at least 1");
  const auto& g = s.graph;
  const int p = s.piece_count();

  verification_report report;
  report.m = s.m;
  auto selected = select_pairs(p, pairs);
  report.pairs.resize(selected.size());
  if (selected.empty()) {
    report.all_verified = true;
    return report;
  }

  witness_context ctx;
  ctx.prepare(g, s.decomposition.pieces, s.m);

  std::vector<std::vector<int>> pieces_of(static_cast<std::size_t>(g.vertex_count()));
  for (int k = 0; k < p; ++k)
    for (vertex_id v : s.piece(k)) pieces_of[static_cast<std::size_t>(v)].push_back(k);

  std::vector<std::vector<int>> piece_dist(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) piece_dist[static_cast<std::size_t>(k)] = distances_from(g, s.piece(k));

  // Union of every candidate ball: a pair is refuted outright when some
  // path dodges all of them, since any chain's witnesses come from the
  // candidate pool.
  point_set all_balls;
  for (vertex_id w : ctx.candidates) all_balls = all_balls.set_or(ctx.balls.at(w));
  separation_labels union_labels = label_components_minus(g, all_balls);

  std::mutex error_lock;
  std::exception_ptr first_error;

  parallel_for(selected.size(), threads, [&](std::size_t idx) {
    try {
      auto [i, j] = selected[idx];
      pair_report& out = report.pairs[idx];
      out.i = i;
      out.j = j;

      bool verified = false;
      if (auto stored = s.chain_for(i, j)) {
        chain_check check = check_chain_impl(s, *stored, &ctx);
        if (check.ok) {
          out.verdict = pair_verdict::verified;
          out.chain = std::move(stored);
          verified = true;
        }
      }
      if (!verified) {
        auto found = search_impl(s, i, j, ctx, piece_dist[static_cast<std::size_t>(i)],
                                 pieces_of);
        if (found) {
          out.verdict = pair_verdict::verified;
          out.chain = std::move(found);
          verified = true;
        }
      }
      if (!verified) {
        blocks_result b =
            blocks_all_paths(g, s.piece(i), s.piece(j), all_balls, union_labels);
        if (!b.blocked) {
          out.verdict = pair_verdict::refuted;
          out.refutation = std::move(b.avoiding_path);
        } else {
          out.verdict = pair_verdict::unknown;
        }
      } else {
        for (vertex_id w : out.chain->witnesses) {
          const point_set& ball =
              ctx.has(w) ? ctx.balls.at(w) : open_ball(g, w, s.m);
          if (s.piece(i).set_minus(ball).empty() || s.piece(j).set_minus(ball).empty()) {
            out.degenerate = true;
            break;
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> hold(error_lock);
      if (!first_error) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);

  for (const auto& pr : report.pairs) {
    switch (pr.verdict) {
      case pair_verdict::verified: ++report.verified_count; break;
      case pair_verdict::refuted: ++report.refuted_count; break;
      case pair_verdict::unknown: ++report.unknown_count; break;
    }
  }
  report.all_verified = report.refuted_count == 0 && report.unknown_count == 0;
  return report;
}

// ---- quasi-convexity ----

convexity_report check_quasi_convexity(const rbp_structure& s, int piece, long long c) {
  if (piece < 0 || piece >= s.piece_count())
    fail(errc::invalid_argument, "piece index out of range");
  if (c < 0) fail(errc::invalid_argument, "neighborhood constant must be nonnegative");
  if (s.m < 1) fail(errc::invalid_argument, "scale constant must be at least 1");
  const auto& g = s.graph;

  convexity_report report;
  report.radius = 2 * s.m + 2 * std::max(s.m, c);

  point_set nbhd = closed_neighborhood(g, s.piece(piece), c);
  std::vector<vertex_id> pts(nbhd.begin(), nbhd.end());
  const std::size_t np = pts.size();
  std::vector<int> dtp = distances_from(g, s.piece(piece));

  std::vector<std::vector<int>> dist(np);
  for (std::size_t a = 0; a < np; ++a) dist[a] = distances_from(g, pts[a]);

  long long diam = 0;
  for (std::size_t a = 0; a < np; ++a)
    for (std::size_t b = a + 1; b < np; ++b)
      diam = std::max(diam, static_cast<long long>(dist[a][static_cast<std::size_t>(pts[b])]));

  // A vertex on a geodesic between neighborhood points sits within diam + c
  // of the piece, so only the ring between the target radius and that bound
  // can host a violation.
  std::vector<vertex_id> ring;
  for (vertex_id v = 0; v < g.vertex_count(); ++v) {
    long long d = dtp[static_cast<std::size_t>(v)];
    if (d > report.radius && d <= diam + c) ring.push_back(v);
  }
  std::sort(ring.begin(), ring.end(), [&](vertex_id a, vertex_id b) {
    int da = dtp[static_cast<std::size_t>(a)];
    int db = dtp[static_cast<std::size_t>(b)];
    return da != db ? da > db : a < b;
  });

  report.pairs_checked = np < 2 ? 0 : static_cast<std::uint64_t>(np) * (np - 1) / 2;
  for (vertex_id v : ring) {
    bool on_geodesic = false;
    for (std::size_t a = 0; a < np && !on_geodesic; ++a) {
      const auto& da = dist[a];
      for (std::size_t b = a + 1; b < np; ++b) {
        vertex_id y = pts[b];
        if (da[static_cast<std::size_t>(v)] +
                dist[b][static_cast<std::size_t>(v)] ==
            da[static_cast<std::size_t>(y)]) {
          on_geodesic = true;
          break;
        }
      }
    }
    if (on_geodesic) {
      report.holds = false;
      report.worst_offender = v;
      report.worst_distance = dtp[static_cast<std::size_t>(v)];
      break;  // ring is sorted by distance, farthest first
    }
  }
  return report;
}

// ---- quasi-isometry transport ----

void qi_map::validate(const metric_graph& source, const metric_graph& target,
                      const sample_spec& pairs) const {
  if (k < 1) fail(errc::invalid_argument, "multiplicative constant must be at least 1");
  if (c < 0) fail(errc::invalid_argument, "additive constant must be nonnegative");
  if (static_cast<vertex_id>(image.size()) != source.vertex_count())
    fail(errc::invalid_argument, "image size does not match source vertex count");
  for (vertex_id v : image)
    if (v < 0 || v >= target.vertex_count())
      fail(errc::invalid_argument, "image vertex out of range");

  point_set image_set(std::vector<vertex_id>(image.begin(), image.end()));
  std::vector<int> to_image = distances_from(target, image_set);
  for (vertex_id v = 0; v < target.vertex_count(); ++v)
    if (to_image[static_cast<std::size_t>(v)] > c)
      fail(errc::invalid_argument,
           "co-density violated: target vertex " + std::to_string(v) +
               " lies at distance " + std::to_string(to_image[static_cast<std::size_t>(v)]) +
               " from the image");

  auto selected = select_pairs(static_cast<int>(source.vertex_count()), pairs);
  std::map<vertex_id, std::vector<int>> src_rows, tgt_rows;
  for (auto [x, y] : selected) {
    auto sit = src_rows.find(x);
    if (sit == src_rows.end())
      sit = src_rows.emplace(x, distances_from(source, x)).first;
    vertex_id qx = image[static_cast<std::size_t>(x)];
    auto tit = tgt_rows.find(qx);
    if (tit == tgt_rows.end())
      tit = tgt_rows.emplace(qx, distances_from(target, qx)).first;
    long long ds = sit->second[static_cast<std::size_t>(y)];
    long long dt = tit->second[static_cast<std::size_t>(image[static_cast<std::size_t>(y)])];
    if (dt > k * ds + c || ds > k * dt + c)
      fail(errc::invalid_argument,
           "quasi-isometry bounds fail on pair (" + std::to_string(x) + ", " +
               std::to_string(y) + "): source distance " + std::to_string(ds) +
               ", target distance " + std::to_string(dt));
  }
}

rbp_structure transport_qi(const rbp_structure& s, const qi_map& q,
                           const metric_graph& target) {
  s.decomposition.validate(s.graph);
  if (s.m < 1) fail(errc::invalid_argument, "scale constant must be at least 1");
  if (static_cast<vertex_id>(q.image.size()) != s.graph.vertex_count())
    fail(errc::invalid_argument, "image size does not match source vertex count");

  rbp_structure out;
  out.graph = target;
  out.m = q.k * (q.k * q.c + 2 * q.c + s.m) + q.c;
  out.decomposition.base_piece = s.decomposition.base_piece;
  out.decomposition.pieces.reserve(s.decomposition.pieces.size());
  for (const auto& piece : s.decomposition.pieces) {
    std::vector<vertex_id> mapped;
    mapped.reserve(piece.size());
    for (vertex_id v : piece) mapped.push_back(q.image[static_cast<std::size_t>(v)]);
    out.decomposition.pieces.push_back(
        closed_neighborhood(target, point_set(std::move(mapped)), q.c));
  }

  for (const auto& [key, chain] : s.certificates) {
    bottleneck_chain moved = chain;
    for (vertex_id& w : moved.witnesses) w = q.image[static_cast<std::size_t>(w)];
    out.certificates[key] = std::move(moved);
  }

  for (const auto& [key, chain] : out.certificates) {
    chain_check check = verify_bottleneck_chain(out, chain);
    if (!check.ok)
      fail(errc::transport_failed,
           "transported chain for pair (" + std::to_string(key.first) + ", " +
               std::to_string(key.second) + ") fails at witness " +
               std::to_string(check.failed_witness));
  }
  return out;
}

// ---- thickening ----

thicken_result thicken(const rbp_structure& s, long long b) {
  s.decomposition.validate(s.graph);
  if (s.m < 1) fail(errc::invalid_argument, "scale constant must be at least 1");
  if (b < 0) fail(errc::invalid_argument, "thickness must be nonnegative");
  const auto& g = s.graph;
  const int p = s.piece_count();
  const vertex_id n = g.vertex_count();
  const int levels = static_cast<int>(2 * b) + 2;  // 0 .. 2b+1

  thicken_result result;
  result.basepoint = n;
  result.height = levels;
  result.level_zero.resize(static_cast<std::size_t>(n));
  for (vertex_id v = 0; v < n; ++v) result.level_zero[static_cast<std::size_t>(v)] = v;

  std::vector<point_set> fat(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) fat[static_cast<std::size_t>(i)] = closed_neighborhood(g, s.piece(i), 4 * s.m);
  const int base = s.decomposition.base_piece;
  const vertex_id attach = *s.piece(base).begin();
  fat[static_cast<std::size_t>(base)].insert(result.basepoint);

  std::vector<std::pair<vertex_id, vertex_id>> level_edges(g.edges());
  level_edges.emplace_back(attach, result.basepoint);

  // Fresh ids for the upper levels, piece by piece, level by level.
  vertex_id next_id = n + 1;
  std::vector<vertex_id> piece_offset(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    piece_offset[static_cast<std::size_t>(i)] = next_id;
    next_id += static_cast<vertex_id>(fat[static_cast<std::size_t>(i)].size()) *
               static_cast<vertex_id>(levels - 1);
  }
  const vertex_id total = next_id;

  std::vector<std::pair<vertex_id, vertex_id>> edges = level_edges;
  std::vector<point_set> new_pieces(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    const auto& f = fat[static_cast<std::size_t>(i)];
    std::vector<vertex_id> members(f.begin(), f.end());
    const vertex_id sz = static_cast<vertex_id>(members.size());
    std::vector<vertex_id> rank(static_cast<std::size_t>(total), -1);
    for (vertex_id r = 0; r < sz; ++r)
      rank[static_cast<std::size_t>(members[static_cast<std::size_t>(r)])] = r;
    auto id_at = [&](vertex_id x, int t) -> vertex_id {
      if (t == 0) return x;
      return piece_offset[static_cast<std::size_t>(i)] +
             static_cast<vertex_id>(t - 1) * sz + rank[static_cast<std::size_t>(x)];
    };

    std::vector<std::pair<vertex_id, vertex_id>> induced;
    for (const auto& [u, v] : level_edges)
      if (f.contains(u) && f.contains(v)) induced.emplace_back(u, v);

    std::vector<vertex_id> all_ids;
    for (int t = 0; t < levels; ++t)
      for (vertex_id x : members) all_ids.push_back(id_at(x, t));
    new_pieces[static_cast<std::size_t>(i)] = point_set(std::move(all_ids));

    for (vertex_id x : members)
      for (int t = 0; t + 1 < levels; ++t)
        edges.emplace_back(id_at(x, t), id_at(x, t + 1));
    for (const auto& [u, v] : induced) {
      for (int t = 1; t < levels; ++t) edges.emplace_back(id_at(u, t), id_at(v, t));
      for (int t = 0; t + 1 < levels; ++t) {
        edges.emplace_back(id_at(u, t), id_at(v, t + 1));
        edges.emplace_back(id_at(v, t), id_at(u, t + 1));
      }
    }
  }

  result.structure.graph = metric_graph(total, edges);
  result.structure.m = 9 * s.m;
  result.structure.decomposition.pieces = std::move(new_pieces);
  result.structure.decomposition.base_piece = base;
  result.structure.certificates = s.certificates;
  return result;
}

// ---- small-cut scan ----

cut_scan_report scan_small_cuts(const rbp_structure& s, long long b) {
  s.decomposition.validate(s.graph);
  if (b < 1) fail(errc::invalid_argument, "scan radius bound must be at least 1");
  const auto& g = s.graph;
  const int p = s.piece_count();
  const vertex_id n = g.vertex_count();

  std::vector<std::vector<char>> in_piece(static_cast<std::size_t>(p),
                                          std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < p; ++i)
    for (vertex_id v : s.piece(i)) in_piece[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)] = 1;

  cut_scan_report report;
  std::vector<char> in_ball(static_cast<std::size_t>(n), 0);
  std::vector<int> seen(static_cast<std::size_t>(n), -1);
  int stamp = 0;
  std::vector<vertex_id> stack;

  for (vertex_id center = 0; center < n; ++center) {
    std::vector<int> dist = distances_from(g, center);
    for (long long radius = 1; radius <= b; ++radius) {
      // Open ball of this radius: distance strictly below radius.
      for (vertex_id v = 0; v < n; ++v)
        in_ball[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(v)] < radius ? 1 : 0;
      ++report.balls_checked;
      for (int i = 0; i < p; ++i) {
        const auto& piece = s.piece(i);
        // Survivors of this piece, then connectivity among them.
        vertex_id start = -1;
        bool touched = false;
        std::size_t alive = 0;
        for (vertex_id v : piece) {
          if (in_ball[static_cast<std::size_t>(v)]) {
            touched = true;
          } else {
            ++alive;
            if (start < 0) start = v;
          }
        }
        if (!touched || alive == 0) continue;
        ++stamp;
        std::size_t reached = 1;
        seen[static_cast<std::size_t>(start)] = stamp;
        stack.assign(1, start);
        while (!stack.empty()) {
          vertex_id u = stack.back();
          stack.pop_back();
          for (vertex_id w : g.neighbors(u)) {
            if (!in_piece[static_cast<std::size_t>(i)][static_cast<std::size_t>(w)]) continue;
            if (in_ball[static_cast<std::size_t>(w)]) continue;
            if (seen[static_cast<std::size_t>(w)] == stamp) continue;
            seen[static_cast<std::size_t>(w)] = stamp;
            ++reached;
            stack.push_back(w);
          }
        }
        if (reached != alive) {
          report.ok = false;
          report.center = center;
          report.radius = radius;
          report.piece = i;
          return report;
        }
      }
    }
  }
  return report;
}

// ---- tree-graded certificates ----

namespace {

void require_connected_piece(const metric_graph& g, const point_set& piece, int index) {
  std::vector<char> member(static_cast<std::size_t>(g.vertex_count()), 0);
  for (vertex_id v : piece) member[static_cast<std::size_t>(v)] = 1;
  std::vector<char> seen(static_cast<std::size_t>(g.vertex_count()), 0);
  std::vector<vertex_id> stack{*piece.begin()};
  seen[static_cast<std::size_t>(*piece.begin())] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    vertex_id u = stack.back();
    stack.pop_back();
    for (vertex_id w : g.neighbors(u)) {
      if (!member[static_cast<std::size_t>(w)] || seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = 1;
      ++reached;
      stack.push_back(w);
    }
  }
  if (reached != piece.size())
    fail(errc::not_tree_graded,
         "piece " + std::to_string(index) + " induces a disconnected subgraph");
}

}  // namespace

rbp_structure tree_graded_certificate(const metric_graph& g,
                                      const piece_decomposition& pieces) {
  pieces.validate(g);
  const int p = static_cast<int>(pieces.pieces.size());
  const vertex_id n = g.vertex_count();

  for (int i = 0; i < p; ++i) require_connected_piece(g, pieces.pieces[i], i);

  std::vector<std::vector<int>> pieces_of(static_cast<std::size_t>(n));
  for (int i = 0; i < p; ++i)
    for (vertex_id v : pieces.pieces[i]) pieces_of[static_cast<std::size_t>(v)].push_back(i);

  for (const auto& [u, v] : g.edges()) {
    bool inside = false;
    for (int i : pieces_of[static_cast<std::size_t>(u)])
      if (pieces.pieces[static_cast<std::size_t>(i)].contains(v)) { inside = true; break; }
    if (!inside)
      fail(errc::not_tree_graded, "edge {" + std::to_string(u) + ", " + std::to_string(v) +
                                      "} lies inside no piece");
  }

  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      point_set inter = pieces.pieces[static_cast<std::size_t>(i)].set_and(
          pieces.pieces[static_cast<std::size_t>(j)]);
      if (inter.size() > 1)
        fail(errc::not_tree_graded, "pieces " + std::to_string(i) + " and " +
                                        std::to_string(j) + " share " +
                                        std::to_string(inter.size()) + " vertices");
    }

  // Incidence graph on pieces and shared vertices must be a tree.
  std::vector<vertex_id> shared;
  for (vertex_id v = 0; v < n; ++v)
    if (pieces_of[static_cast<std::size_t>(v)].size() >= 2) shared.push_back(v);
  std::map<vertex_id, int> shared_index;
  for (std::size_t a = 0; a < shared.size(); ++a)
    shared_index[shared[a]] = static_cast<int>(a);

  const int nodes = p + static_cast<int>(shared.size());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
  int incidences = 0;
  for (vertex_id v : shared)
    for (int i : pieces_of[static_cast<std::size_t>(v)]) {
      int sv = p + shared_index[v];
      adj[static_cast<std::size_t>(i)].push_back(sv);
      adj[static_cast<std::size_t>(sv)].push_back(i);
      ++incidences;
    }
  if (incidences != nodes - 1)
    fail(errc::not_tree_graded,
         "piece incidence graph has " + std::to_string(incidences) + " incidences over " +
             std::to_string(nodes) + " nodes, so it is not a tree");
  {
    std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : adj[static_cast<std::size_t>(u)])
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++reached;
          stack.push_back(w);
        }
    }
    if (reached != nodes)
      fail(errc::not_tree_graded, "piece incidence graph is disconnected");
  }

  rbp_structure out;
  out.graph = g;
  out.m = 2;
  out.decomposition.base_piece = pieces.base_piece;
  out.decomposition.pieces.reserve(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i)
    out.decomposition.pieces.push_back(closed_neighborhood(g, pieces.pieces[static_cast<std::size_t>(i)], 1));

  // One chain per pair, read off a canonical geodesic between the original
  // pieces; every transition vertex is the unique shared cut vertex.
  for (int i = 0; i < p; ++i) {
    std::vector<int> dist_i = distances_from(g, pieces.pieces[static_cast<std::size_t>(i)]);
    for (int j = i + 1; j < p; ++j) {
      int d = -1;
      vertex_id y = -1;
      for (vertex_id cand : pieces.pieces[static_cast<std::size_t>(j)]) {
        int dc = dist_i[static_cast<std::size_t>(cand)];
        if (d < 0 || dc < d) { d = dc; y = cand; }
      }
      bottleneck_chain chain;
      chain.source = i;
      chain.target = j;
      if (d == 0) {
        chain.piece_indices = {i, j};
        chain.witnesses = {y};
        out.store_chain(std::move(chain));
        continue;
      }
      std::vector<int> dist_y = distances_from(g, y);
      vertex_id x = -1;
      for (vertex_id cand : pieces.pieces[static_cast<std::size_t>(i)])
        if (dist_y[static_cast<std::size_t>(cand)] == d) { x = cand; break; }
      path_witness geo = canonical_geodesic(g, x, y);

      chain.piece_indices = {i};
      int cur = i;
      for (std::size_t t = 1; t < geo.vertices.size(); ++t) {
        vertex_id v = geo.vertices[t];
        if (pieces.pieces[static_cast<std::size_t>(cur)].contains(v)) continue;
        vertex_id prev = geo.vertices[t - 1];
        int next = -1;
        for (int k : pieces_of[static_cast<std::size_t>(prev)])
          if (pieces.pieces[static_cast<std::size_t>(k)].contains(v)) { next = k; break; }
        if (next < 0)
          fail(errc::not_tree_graded, "geodesic step {" + std::to_string(prev) + ", " +
                                          std::to_string(v) + "} lies inside no piece");
        for (int seen_piece : chain.piece_indices)
          if (seen_piece == next)
            fail(errc::not_tree_graded,
                 "canonical geodesic re-enters piece " + std::to_string(next));
        chain.piece_indices.push_back(next);
        chain.witnesses.push_back(prev);
        cur = next;
      }
      if (cur != j) {
        chain.piece_indices.push_back(j);
        chain.witnesses.push_back(y);
      }
      out.store_chain(std::move(chain));
    }
  }
  return out;
}

}  // namespace tg
