// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_TOUR_HPP
#define QCTSP_TOUR_HPP

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qctsp/geo.hpp"

namespace qctsp {

struct Tour {
  std::vector<int> order;  // distinct city indices
  bool closed = true;      // cost includes the return edge
};

inline void validate_tour(const Tour& t, std::size_t n_cities) {
  std::vector<bool> seen(n_cities, false);
  for (int c : t.order) {
    if (c < 0 || static_cast<std::size_t>(c) >= n_cities)
      throw std::invalid_argument("tour: city index " + std::to_string(c) +
                                  " out of range");
    if (seen[static_cast<std::size_t>(c)])
      throw std::invalid_argument("tour: duplicate city " + std::to_string(c));
    seen[static_cast<std::size_t>(c)] = true;
  }
}

inline double tour_cost(const Tour& t, const DistanceMatrix& dm) {
  validate_tour(t, dm.size());
  if (t.order.size() < 2) return 0.0;
  double cost = 0.0;
  for (std::size_t i = 0; i + 1 < t.order.size(); ++i)
    cost += dm.at(static_cast<std::size_t>(t.order[i]),
                  static_cast<std::size_t>(t.order[i + 1]));
  if (t.closed)
    cost += dm.at(static_cast<std::size_t>(t.order.back()),
                  static_cast<std::size_t>(t.order.front()));
  return cost;
}

// Exhaustive search over (n-1)! orderings with the start fixed.
// Lexicographic enumeration + strict improvement = lexicographic tie-break.
inline Tour brute_force_optimal(const DistanceMatrix& dm, int start) {
  const int n = static_cast<int>(dm.size());
  if (n < 2 || n > 10)
    throw std::invalid_argument("brute_force_optimal: n must be in [2, 10], got " +
                                std::to_string(n));
  if (start < 0 || start >= n)
    throw std::invalid_argument("brute_force_optimal: bad start index");

  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (i != start) rest.push_back(i);
  std::sort(rest.begin(), rest.end());

  Tour best;
  best.closed = true;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    Tour cand;
    cand.closed = true;
    cand.order.push_back(start);
    cand.order.insert(cand.order.end(), rest.begin(), rest.end());
    const double c = tour_cost(cand, dm);
    if (c < best_cost) {
      best_cost = c;
      best = cand;
    }
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

namespace detail {

// Prim MST rooted at `start`; equal candidate distances resolve to the
// lowest vertex index.
inline std::vector<std::pair<int, int>> prim_mst(const DistanceMatrix& dm,
                                                 int start) {
  const int n = static_cast<int>(dm.size());
  std::vector<bool> in_tree(n, false);
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  dist[start] = 0.0;
  std::vector<std::pair<int, int>> edges;
  for (int step = 0; step < n; ++step) {
    int u = -1;
    for (int v = 0; v < n; ++v)
      if (!in_tree[v] && (u == -1 || dist[v] < dist[u])) u = v;
    in_tree[u] = true;
    if (parent[u] >= 0) edges.emplace_back(parent[u], u);
    for (int v = 0; v < n; ++v)
      if (!in_tree[v] && dm.at(u, v) < dist[v]) {
        dist[v] = dm.at(u, v);
        parent[v] = u;
      }
  }
  return edges;
}

// Hierholzer circuit over an even-degree multigraph; neighbors are taken
// in ascending index order.
inline std::vector<int> euler_circuit(int n, int start,
                                      const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge id)
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    adj[edges[e].first].emplace_back(edges[e].second, e);
    adj[edges[e].second].emplace_back(edges[e].first, e);
  }
  for (auto& lst : adj) std::sort(lst.begin(), lst.end());
  std::vector<bool> used(edges.size(), false);
  std::vector<std::size_t> next(n, 0);
  std::vector<int> stack{start};
  std::vector<int> circuit;
  while (!stack.empty()) {
    int v = stack.back();
    while (next[v] < adj[v].size() && used[adj[v][next[v]].second]) ++next[v];
    if (next[v] == adj[v].size()) {
      circuit.push_back(v);
      stack.pop_back();
    } else {
      auto [w, e] = adj[v][next[v]];
      used[e] = true;
      stack.push_back(w);
    }
  }
  std::reverse(circuit.begin(), circuit.end());
  return circuit;
}

inline Tour shortcut_circuit(const std::vector<int>& circuit, int n, int start) {
  std::vector<bool> visited(n, false);
  Tour t;
  t.closed = true;
  for (int v : circuit)
    if (!visited[v]) {
      visited[v] = true;
      t.order.push_back(v);
    }
  auto it = std::find(t.order.begin(), t.order.end(), start);
  std::rotate(t.order.begin(), it, t.order.end());
  return t;
}

}  // namespace detail

// MST-based heuristic baseline: Prim tree, greedy nearest-pair matching of
// odd-degree vertices, Eulerian circuit, shortcutting. A doubled-tree
// variant is built alongside and the cheaper of the two is returned, which
// keeps the 2x optimum bound of the double-tree argument on metric inputs.
inline Tour mst_heuristic(const DistanceMatrix& dm, int start) {
  const int n = static_cast<int>(dm.size());
  if (n < 2) throw std::invalid_argument("mst_heuristic: need at least 2 cities");
  if (start < 0 || start >= n)
    throw std::invalid_argument("mst_heuristic: bad start index");

  const auto mst = detail::prim_mst(dm, start);

  // Greedy matching: repeatedly connect the closest remaining odd pair.
  std::vector<int> degree(n, 0);
  for (auto [u, v] : mst) {
    ++degree[u];
    ++degree[v];
  }
  std::vector<int> odd;
  for (int v = 0; v < n; ++v)
    if (degree[v] % 2 == 1) odd.push_back(v);
  auto matched = mst;
  std::vector<bool> taken(n, false);
  for (std::size_t remaining = odd.size(); remaining >= 2; remaining -= 2) {
    double best = std::numeric_limits<double>::infinity();
    int bu = -1, bv = -1;
    for (std::size_t a = 0; a < odd.size(); ++a) {
      if (taken[odd[a]]) continue;
      for (std::size_t b = a + 1; b < odd.size(); ++b) {
        if (taken[odd[b]]) continue;
        if (dm.at(odd[a], odd[b]) < best) {
          best = dm.at(odd[a], odd[b]);
          bu = odd[a];
          bv = odd[b];
        }
      }
    }
    taken[bu] = taken[bv] = true;
    matched.emplace_back(bu, bv);
  }

  const Tour via_matching =
      detail::shortcut_circuit(detail::euler_circuit(n, start, matched), n, start);

  auto doubled = mst;
  doubled.insert(doubled.end(), mst.begin(), mst.end());
  const Tour via_double_tree =
      detail::shortcut_circuit(detail::euler_circuit(n, start, doubled), n, start);

  return tour_cost(via_matching, dm) <= tour_cost(via_double_tree, dm)
             ? via_matching
             : via_double_tree;
}

// Concatenate per-cluster open paths into one closed tour. The path holding
// `start_city` is rotated so the start leads; each remaining cluster is
// chosen by the distance from the current tail to its nearer path end, and
// appended with that end first (reversing when the nearer end is the back).
inline Tour stitch(const std::vector<std::vector<int>>& cluster_paths,
                   int start_city, const DistanceMatrix& dm) {
  const std::size_t n = dm.size();
  std::vector<bool> seen(n, false);
  std::size_t total = 0;
  for (const auto& path : cluster_paths)
    for (int c : path) {
      if (c < 0 || static_cast<std::size_t>(c) >= n)
        throw std::invalid_argument("stitch: city index out of range");
      if (seen[static_cast<std::size_t>(c)])
        throw std::invalid_argument("stitch: city " + std::to_string(c) +
                                    " appears in more than one path");
      seen[static_cast<std::size_t>(c)] = true;
      ++total;
    }
  if (total != n)
    throw std::invalid_argument("stitch: paths cover " + std::to_string(total) +
                                " of " + std::to_string(n) + " cities");

  int start_cluster = -1;
  for (std::size_t k = 0; k < cluster_paths.size(); ++k)
    if (std::find(cluster_paths[k].begin(), cluster_paths[k].end(), start_city) !=
        cluster_paths[k].end())
      start_cluster = static_cast<int>(k);
  if (start_cluster < 0)
    throw std::invalid_argument("stitch: start city not present in any path");

  Tour tour;
  tour.closed = true;
  {
    auto path = cluster_paths[static_cast<std::size_t>(start_cluster)];
    auto it = std::find(path.begin(), path.end(), start_city);
    std::rotate(path.begin(), it, path.end());
    tour.order = path;
  }

  std::vector<bool> used(cluster_paths.size(), false);
  used[static_cast<std::size_t>(start_cluster)] = true;
  for (std::size_t appended = 1; appended < cluster_paths.size(); ++appended) {
    const int tail = tour.order.back();
    double best = std::numeric_limits<double>::infinity();
    int best_k = -1;
    bool best_reverse = false;
    for (std::size_t k = 0; k < cluster_paths.size(); ++k) {
      if (used[k] || cluster_paths[k].empty()) continue;
      const double d_front = dm.at(tail, cluster_paths[k].front());
      const double d_back = dm.at(tail, cluster_paths[k].back());
      const double d_entry = std::min(d_front, d_back);
      if (d_entry < best) {
        best = d_entry;
        best_k = static_cast<int>(k);
        best_reverse = d_back < d_front;
      }
    }
    if (best_k < 0) {  // only empty paths remain
      for (std::size_t k = 0; k < cluster_paths.size(); ++k)
        if (!used[k]) used[k] = true;
      break;
    }
    auto path = cluster_paths[static_cast<std::size_t>(best_k)];
    if (best_reverse) std::reverse(path.begin(), path.end());
    tour.order.insert(tour.order.end(), path.begin(), path.end());
    used[static_cast<std::size_t>(best_k)] = true;
  }
  return tour;
}

// Reverse the segment [i..j]; index 0 (the start city) never moves.
inline Tour two_opt_swap(const Tour& t, std::size_t i, std::size_t j) {
  if (i == 0 || j >= t.order.size() || i > j)
    throw std::invalid_argument("two_opt_swap: need 0 < i <= j < tour length");
  Tour out = t;
  std::reverse(out.order.begin() + static_cast<std::ptrdiff_t>(i),
               out.order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
  return out;
}

}  // namespace qctsp

#endif  // QCTSP_TOUR_HPP
