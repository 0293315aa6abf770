#pragma once
// Brute-force reference implementations, deliberately written with
// different algorithms than the library (relaxation instead of BFS, path
// enumeration instead of component labeling, union-find instead of flood
// fill).  Exponential pieces are only ever called on tiny graphs.

#include <optional>
#include <vector>

#include "treegrade/metric_graph.hpp"

namespace tg::oracles {

// Single-source distances by iterated edge relaxation.
std::vector<int> oracle_distances(const metric_graph& g, vertex_id from);

// Every simple path from `a` to `b`, as vertex sequences; stops after `cap`
// paths (0 means unlimited).
std::vector<std::vector<vertex_id>> oracle_all_simple_paths(const metric_graph& g,
                                                            const point_set& a,
                                                            const point_set& b,
                                                            std::size_t cap = 0);

// First simple path from `a` to `b` that avoids `blocked` entirely.
std::optional<std::vector<vertex_id>> oracle_avoiding_path(const metric_graph& g,
                                                           const point_set& a,
                                                           const point_set& b,
                                                           const point_set& blocked);

// Vertices lying on at least one shortest simple path from x to y.
std::vector<vertex_id> oracle_geodesic_vertices(const metric_graph& g, vertex_id x,
                                                vertex_id y);

// Number of connected components of the graph minus `removed`, by
// union-find over surviving edges.
int oracle_component_count(const metric_graph& g, const point_set& removed);

}  // namespace tg::oracles
