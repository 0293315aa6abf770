#pragma once
// Small graph builders shared across test files.

#include <utility>
#include <vector>

#include "treegrade/metric_graph.hpp"
#include "treegrade/prng.hpp"

namespace tg::testing {

inline metric_graph path_graph(int n) {
  std::vector<std::pair<vertex_id, vertex_id>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return metric_graph(n, edges);
}

inline metric_graph cycle_graph(int n) {
  std::vector<std::pair<vertex_id, vertex_id>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return metric_graph(n, edges);
}

inline metric_graph complete_graph(int n) {
  std::vector<std::pair<vertex_id, vertex_id>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return metric_graph(n, edges);
}

// Random spanning tree plus `extra` random chords; always connected.
inline metric_graph random_connected(std::uint64_t seed, int n, int extra) {
  splitmix64 rng(seed);
  std::vector<std::pair<vertex_id, vertex_id>> edges;
  for (int v = 1; v < n; ++v)
    edges.emplace_back(static_cast<vertex_id>(rng.next_below(static_cast<std::uint64_t>(v))), v);
  int added = 0;
  int guard = 0;
  while (added < extra && guard < 50 * (extra + 1)) {
    ++guard;
    auto u = static_cast<vertex_id>(rng.next_below(static_cast<std::uint64_t>(n)));
    auto v = static_cast<vertex_id>(rng.next_below(static_cast<std::uint64_t>(n)));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    bool dup = false;
    for (const auto& e : edges)
      if (e == std::make_pair(u, v)) { dup = true; break; }
    if (dup) continue;
    edges.emplace_back(u, v);
    ++added;
  }
  return metric_graph(n, edges);
}

inline point_set single(vertex_id v) { return point_set(std::vector<vertex_id>{v}); }

// True iff fn() raises a tg::error with the given code.
template <typename Fn>
bool raises(Fn&& fn, errc code) {
  try {
    fn();
  } catch (const error& e) {
    return e.code() == code;
  } catch (...) {
    return false;
  }
  return false;
}

}  // namespace tg::testing
