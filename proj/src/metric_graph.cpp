#include "treegrade/metric_graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "treegrade/prng.hpp"

namespace tg {

// ---------------------------------------------------------------- point_set

point_set::point_set(std::vector<vertex_id> vertices) : items_(std::move(vertices)) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool point_set::contains(vertex_id v) const {
  return std::binary_search(items_.begin(), items_.end(), v);
}

void point_set::insert(vertex_id v) {
  auto it = std::lower_bound(items_.begin(), items_.end(), v);
  if (it == items_.end() || *it != v) items_.insert(it, v);
}

point_set point_set::set_minus(const point_set& other) const {
  std::vector<vertex_id> out;
  std::set_difference(items_.begin(), items_.end(), other.items_.begin(),
                      other.items_.end(), std::back_inserter(out));
  point_set r;
  r.items_ = std::move(out);
  return r;
}

point_set point_set::set_and(const point_set& other) const {
  std::vector<vertex_id> out;
  std::set_intersection(items_.begin(), items_.end(), other.items_.begin(),
                        other.items_.end(), std::back_inserter(out));
  point_set r;
  r.items_ = std::move(out);
  return r;
}

point_set point_set::set_or(const point_set& other) const {
  std::vector<vertex_id> out;
  std::set_union(items_.begin(), items_.end(), other.items_.begin(),
                 other.items_.end(), std::back_inserter(out));
  point_set r;
  r.items_ = std::move(out);
  return r;
}

// ----------------------------------------------------------------- rational

rational::rational(long long n, long long d) : num(n), den(d) {
  if (den <= 0) fail(errc::invalid_argument, "rational denominator must be positive");
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

rational rational::parse(const std::string& text) {
  if (text.empty()) fail(errc::invalid_argument, "empty rational literal");
  const auto digits_only = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](char c) { return c >= '0' && c <= '9'; });
  };
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
    if (!digits_only(a) || !digits_only(b))
      fail(errc::invalid_argument, "bad rational literal '" + text + "'");
    return rational(std::stoll(a), std::stoll(b));
  }
  const auto dot = text.find('.');
  if (dot != std::string::npos) {
    const std::string a = text.substr(0, dot), b = text.substr(dot + 1);
    if (!digits_only(a) || !digits_only(b) || b.size() > 12)
      fail(errc::invalid_argument, "bad rational literal '" + text + "'");
    long long den = 1;
    for (std::size_t i = 0; i < b.size(); ++i) den *= 10;
    return rational(std::stoll(a) * den + std::stoll(b), den);
  }
  if (!digits_only(text)) fail(errc::invalid_argument, "bad rational literal '" + text + "'");
  return rational(std::stoll(text), 1);
}

std::string rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

// ------------------------------------------------------------- metric_graph

metric_graph::metric_graph(vertex_id n, std::vector<std::pair<vertex_id, vertex_id>> edges)
    : n_(n) {
  if (n <= 0) fail(errc::invalid_argument, "graph needs at least one vertex");
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      fail(errc::invalid_argument, "edge endpoint out of range");
    if (u == v) fail(errc::invalid_argument, "self loop at vertex " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    fail(errc::invalid_argument, "duplicate edge");
  edges_ = std::move(edges);

  adj_.assign(n_, {});
  for (const auto& [u, v] : edges_) {
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }
  for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());

  const auto dist = distances_from(*this, 0);
  for (vertex_id v = 0; v < n_; ++v)
    if (dist[v] < 0) fail(errc::invalid_argument, "graph is not connected");
}

bool metric_graph::has_edge(vertex_id u, vertex_id v) const {
  if (u > v) std::swap(u, v);
  return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(u, v));
}

// ------------------------------------------------------------- path_witness

bool path_witness::valid_in(const metric_graph& g) const {
  if (vertices.empty()) return false;
  for (const vertex_id v : vertices)
    if (v < 0 || v >= g.vertex_count()) return false;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
    if (!g.has_edge(vertices[i], vertices[i + 1])) return false;
  return true;
}

path_witness path_witness::reversed() const {
  path_witness r = *this;
  std::reverse(r.vertices.begin(), r.vertices.end());
  return r;
}

// -------------------------------------------------------- metric primitives

std::vector<int> distances_from(const metric_graph& g, vertex_id source) {
  point_set s;
  s.insert(source);
  return distances_from(g, s);
}

std::vector<int> distances_from(const metric_graph& g, const point_set& sources) {
  std::vector<int> dist(g.vertex_count(), -1);
  std::queue<vertex_id> q;
  for (const vertex_id s : sources) {
    if (s < 0 || s >= g.vertex_count()) fail(errc::invalid_argument, "source out of range");
    dist[s] = 0;
    q.push(s);
  }
  while (!q.empty()) {
    const vertex_id v = q.front();
    q.pop();
    for (const vertex_id w : g.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

point_set open_ball(const metric_graph& g, vertex_id w, long long r) {
  // d < r on integers means d <= r - 1.
  if (r <= 0) return {};
  const auto dist = distances_from(g, w);
  std::vector<vertex_id> out;
  for (vertex_id v = 0; v < g.vertex_count(); ++v)
    if (dist[v] >= 0 && dist[v] <= r - 1) out.push_back(v);
  return point_set(std::move(out));
}

point_set open_ball(const metric_graph& g, vertex_id w, const rational& r) {
  if (r.num <= 0) return {};
  // Largest integer distance admitted by d*den < num.
  return open_ball(g, w, (r.num - 1) / r.den + 1);
}

point_set closed_neighborhood(const metric_graph& g, const point_set& a, long long r) {
  if (r < 0 || a.empty()) return {};
  const auto dist = distances_from(g, a);
  std::vector<vertex_id> out;
  for (vertex_id v = 0; v < g.vertex_count(); ++v)
    if (dist[v] >= 0 && dist[v] <= r) out.push_back(v);
  return point_set(std::move(out));
}

point_set geodesic_vertices(const metric_graph& g, vertex_id x, vertex_id y) {
  const auto dx = distances_from(g, x);
  const auto dy = distances_from(g, y);
  std::vector<vertex_id> out;
  for (vertex_id v = 0; v < g.vertex_count(); ++v)
    if (dx[v] + dy[v] == dx[y]) out.push_back(v);
  return point_set(std::move(out));
}

path_witness canonical_geodesic(const metric_graph& g, vertex_id x, vertex_id y) {
  const auto dist = distances_from(g, y);
  if (x < 0 || x >= g.vertex_count() || dist[x] < 0)
    fail(errc::invalid_argument, "geodesic endpoints not connected");
  path_witness path;
  vertex_id v = x;
  path.vertices.push_back(v);
  while (v != y) {
    // Neighbor lists are sorted, so the first descent is the smallest id.
    for (const vertex_id w : g.neighbors(v)) {
      if (dist[w] == dist[v] - 1) {
        v = w;
        break;
      }
    }
    path.vertices.push_back(v);
  }
  return path;
}

separation_labels label_components_minus(const metric_graph& g, const point_set& removed) {
  separation_labels labels;
  labels.comp.assign(g.vertex_count(), -2);
  for (const vertex_id v : removed)
    if (v >= 0 && v < g.vertex_count()) labels.comp[v] = -1;
  int next = 0;
  std::queue<vertex_id> q;
  for (vertex_id s = 0; s < g.vertex_count(); ++s) {
    if (labels.comp[s] != -2) continue;
    labels.comp[s] = next;
    q.push(s);
    while (!q.empty()) {
      const vertex_id v = q.front();
      q.pop();
      for (const vertex_id w : g.neighbors(v)) {
        if (labels.comp[w] == -2) {
          labels.comp[w] = next;
          q.push(w);
        }
      }
    }
    ++next;
  }
  return labels;
}

namespace {

// BFS from a-minus-ball to b-minus-ball through g minus ball; returns the
// avoiding path if one exists.
std::optional<path_witness> find_avoiding_path(const metric_graph& g, const point_set& a,
                                               const point_set& b, const point_set& ball) {
  std::vector<vertex_id> parent(g.vertex_count(), -2);
  std::queue<vertex_id> q;
  for (const vertex_id s : a) {
    if (ball.contains(s)) continue;
    parent[s] = -1;
    q.push(s);
  }
  vertex_id hit = -1;
  for (const vertex_id t : b) {
    if (!ball.contains(t) && parent[t] == -1) hit = hit < 0 ? t : std::min(hit, t);
  }
  while (hit < 0 && !q.empty()) {
    const vertex_id v = q.front();
    q.pop();
    for (const vertex_id w : g.neighbors(v)) {
      if (parent[w] != -2 || ball.contains(w)) continue;
      parent[w] = v;
      if (b.contains(w)) {
        hit = w;
        break;
      }
      q.push(w);
    }
  }
  if (hit < 0) return std::nullopt;
  path_witness path;
  for (vertex_id v = hit; v != -1; v = parent[v]) path.vertices.push_back(v);
  std::reverse(path.vertices.begin(), path.vertices.end());
  return path;
}

}  // namespace

blocks_result blocks_all_paths(const metric_graph& g, const point_set& a,
                               const point_set& b, const point_set& ball) {
  blocks_result r;
  auto path = find_avoiding_path(g, a, b, ball);
  if (path) {
    r.blocked = false;
    r.avoiding_path = std::move(*path);
  } else {
    r.blocked = true;
  }
  return r;
}

blocks_result blocks_all_paths(const metric_graph& g, const point_set& a,
                               const point_set& b, const point_set& ball,
                               const separation_labels& labels) {
  blocks_result r;
  std::vector<char> seen;
  bool a_alive = false, shared = false;
  for (const vertex_id v : a) {
    const int c = labels.comp[v];
    if (c < 0) continue;
    a_alive = true;
    if (static_cast<std::size_t>(c) >= seen.size()) seen.resize(c + 1, 0);
    seen[c] = 1;
  }
  if (a_alive) {
    for (const vertex_id v : b) {
      const int c = labels.comp[v];
      if (c >= 0 && static_cast<std::size_t>(c) < seen.size() && seen[c]) {
        shared = true;
        break;
      }
    }
  }
  if (!shared) {
    r.blocked = true;
    return r;
  }
  r.blocked = false;
  r.avoiding_path = find_avoiding_path(g, a, b, ball);
  return r;
}

// -------------------------------------------------------------- pair sampling

sample_spec sample_spec::sample(std::uint64_t count, std::uint64_t seed) {
  sample_spec s;
  s.kind = mode::sample;
  s.count = count;
  s.seed = seed;
  return s;
}

sample_spec sample_spec::parse(const std::string& text, std::uint64_t seed) {
  if (text == "all") return all();
  const std::string prefix = "sample:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string k = text.substr(prefix.size());
    if (!k.empty() && std::all_of(k.begin(), k.end(),
                                  [](char c) { return c >= '0' && c <= '9'; }))
      return sample(std::stoull(k), seed);
  }
  fail(errc::invalid_argument, "bad pair spec '" + text + "' (want all|sample:K)");
}

std::string sample_spec::str() const {
  if (kind == mode::all) return "all";
  return "sample:" + std::to_string(count);
}

std::vector<std::pair<int, int>> select_pairs(int n, const sample_spec& spec) {
  std::vector<std::pair<int, int>> out;
  if (n < 2) return out;
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const auto decode = [n](std::uint64_t k) {
    // Row i covers indices [cum(i), cum(i) + n-1-i).
    int i = 0;
    std::uint64_t cum = 0;
    while (k >= cum + static_cast<std::uint64_t>(n - 1 - i)) {
      cum += n - 1 - i;
      ++i;
    }
    return std::make_pair(i, static_cast<int>(i + 1 + (k - cum)));
  };
  if (spec.kind == sample_spec::mode::all || spec.count >= total) {
    out.reserve(total);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
    return out;
  }
  // Floyd's algorithm: uniform `count`-subset of pair indices, then sorted.
  splitmix64 rng(spec.seed);
  std::vector<std::uint64_t> chosen;
  chosen.reserve(spec.count);
  const auto has = [&chosen](std::uint64_t v) {
    return std::find(chosen.begin(), chosen.end(), v) != chosen.end();
  };
  for (std::uint64_t j = total - spec.count; j < total; ++j) {
    const std::uint64_t t = rng.next_below(j + 1);
    chosen.push_back(has(t) ? j : t);
  }
  std::sort(chosen.begin(), chosen.end());
  out.reserve(chosen.size());
  for (const std::uint64_t k : chosen) out.push_back(decode(k));
  return out;
}

// ----------------------------------------------------------------- manning

manning_report check_manning_bp(const metric_graph& g, const rational& delta,
                                const sample_spec& pairs) {
  manning_report report;
  report.delta = delta;
  for (const auto& [x, y] : select_pairs(g.vertex_count(), pairs)) {
    ++report.pairs_checked;
    const auto geo = canonical_geodesic(g, x, y);
    const vertex_id mid = geo.vertices[geo.length() / 2];
    const auto ball = open_ball(g, mid, delta);
    point_set a, b;
    a.insert(x);
    b.insert(y);
    auto blocked = blocks_all_paths(g, a, b, ball);
    if (!blocked.blocked) {
      report.passed = false;
      manning_failure f;
      f.x = x;
      f.y = y;
      f.midpoint = mid;
      f.avoiding_path = std::move(*blocked.avoiding_path);
      report.failures.push_back(std::move(f));
    }
  }
  return report;
}

}  // namespace tg
