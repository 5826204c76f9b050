// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_CLUSTER_HPP
#define QCTSP_CLUSTER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qctsp/rng.hpp"

namespace qctsp {

using Point = std::pair<double, double>;  // (lat, lon), raw degrees

struct ClusterAssignment {
  int k = 0;
  std::vector<std::vector<int>> members;  // partition of {0..n-1}
  std::vector<Point> centroids;
};

inline constexpr int kDefaultClusterCap = 4;

// k = ceil(n / 4): keeps every sub-problem at <= 16 qubits.
inline int choose_k(std::size_t n) {
  if (n == 0) throw std::invalid_argument("choose_k: no cities");
  return static_cast<int>((n + 3) / 4);
}

namespace detail {

inline double sq_dist(const Point& a, const Point& b) {
  const double dx = a.first - b.first;
  const double dy = a.second - b.second;
  return dx * dx + dy * dy;
}

inline Point mean_point(const std::vector<Point>& pts, const std::vector<int>& idx) {
  Point c{0.0, 0.0};
  for (int i : idx) {
    c.first += pts[static_cast<std::size_t>(i)].first;
    c.second += pts[static_cast<std::size_t>(i)].second;
  }
  c.first /= static_cast<double>(idx.size());
  c.second /= static_cast<double>(idx.size());
  return c;
}

inline void validate_partition(const ClusterAssignment& a, std::size_t n) {
  std::vector<bool> seen(n, false);
  for (const auto& cluster : a.members)
    for (int i : cluster) {
      if (i < 0 || static_cast<std::size_t>(i) >= n)
        throw std::invalid_argument("cluster: index out of range");
      if (seen[static_cast<std::size_t>(i)])
        throw std::invalid_argument("cluster: index " + std::to_string(i) +
                                    " assigned twice");
      seen[static_cast<std::size_t>(i)] = true;
    }
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i])
      throw std::invalid_argument("cluster: index " + std::to_string(i) +
                                  " unassigned");
}

}  // namespace detail

// Lloyd's iteration on raw (lat, lon) with the Euclidean metric.
// Ties go to the lowest cluster index; empty clusters are re-seeded from the
// farthest point of the largest cluster. Terminates at an assignment
// fixpoint or after max_iter sweeps.
inline ClusterAssignment kmeans(const std::vector<Point>& points, int k,
                                int max_iter, std::uint64_t seed) {
  const std::size_t n = points.size();
  if (k <= 0 || static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("kmeans: k = " + std::to_string(k) +
                                " not in [1, " + std::to_string(n) + "]");
  if (max_iter < 1) throw std::invalid_argument("kmeans: max_iter must be >= 1");

  // Initial centroids: k distinct points drawn by the seeded RNG.
  Rng rng(seed);
  std::vector<int> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<int>(i);
  std::vector<Point> centroids;
  for (int c = 0; c < k; ++c) {
    const std::size_t pick = rng.next_below(pool.size());
    centroids.push_back(points[static_cast<std::size_t>(pool[pick])]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = detail::sq_dist(points[i], centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = detail::sq_dist(points[i], centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }

    std::vector<std::vector<int>> groups(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i)
      groups[static_cast<std::size_t>(assign[i])].push_back(static_cast<int>(i));

    // Re-seed any empty cluster from the farthest point of the largest one.
    for (int c = 0; c < k; ++c) {
      auto& empty = groups[static_cast<std::size_t>(c)];
      if (!empty.empty()) continue;
      int largest = 0;
      for (int g = 1; g < k; ++g)
        if (groups[static_cast<std::size_t>(g)].size() >
            groups[static_cast<std::size_t>(largest)].size())
          largest = g;
      auto& donor = groups[static_cast<std::size_t>(largest)];
      const Point dc = detail::mean_point(points, donor);
      std::size_t far_pos = 0;
      double far_d = -1.0;
      for (std::size_t p = 0; p < donor.size(); ++p) {
        const double d = detail::sq_dist(points[static_cast<std::size_t>(donor[p])], dc);
        if (d > far_d) {
          far_d = d;
          far_pos = p;
        }
      }
      const int moved = donor[far_pos];
      donor.erase(donor.begin() + static_cast<std::ptrdiff_t>(far_pos));
      empty.push_back(moved);
      assign[static_cast<std::size_t>(moved)] = c;
      changed = true;
    }

    for (int c = 0; c < k; ++c)
      centroids[static_cast<std::size_t>(c)] =
          detail::mean_point(points, groups[static_cast<std::size_t>(c)]);

    if (!changed) break;
  }

  ClusterAssignment out;
  out.members.assign(static_cast<std::size_t>(k), {});
  for (std::size_t i = 0; i < n; ++i)
    out.members[static_cast<std::size_t>(assign[i])].push_back(static_cast<int>(i));
  out.members.erase(std::remove_if(out.members.begin(), out.members.end(),
                                   [](const auto& m) { return m.empty(); }),
                    out.members.end());
  out.k = static_cast<int>(out.members.size());
  out.centroids.clear();
  for (const auto& m : out.members)
    out.centroids.push_back(detail::mean_point(points, m));
  detail::validate_partition(out, n);
  return out;
}

// Split oversized clusters: detach the member farthest from the current
// centroid and hand it to the smallest cluster with room, or open a new
// cluster when none has room. k may grow; the partition is preserved.
inline ClusterAssignment enforce_cap(const ClusterAssignment& assignment,
                                     const std::vector<Point>& points,
                                     int cap = kDefaultClusterCap) {
  if (cap < 1) throw std::invalid_argument("enforce_cap: cap must be >= 1");
  auto members = assignment.members;

  auto find_oversized = [&]() -> int {
    for (std::size_t c = 0; c < members.size(); ++c)
      if (members[c].size() > static_cast<std::size_t>(cap))
        return static_cast<int>(c);
    return -1;
  };

  for (int src = find_oversized(); src >= 0; src = find_oversized()) {
    auto& donor = members[static_cast<std::size_t>(src)];
    const Point centroid = detail::mean_point(points, donor);
    std::size_t far_pos = 0;
    double far_d = -1.0;
    for (std::size_t p = 0; p < donor.size(); ++p) {
      const double d =
          detail::sq_dist(points[static_cast<std::size_t>(donor[p])], centroid);
      if (d > far_d) {
        far_d = d;
        far_pos = p;
      }
    }
    const int moved = donor[far_pos];
    donor.erase(donor.begin() + static_cast<std::ptrdiff_t>(far_pos));

    int dest = -1;
    for (std::size_t c = 0; c < members.size(); ++c) {
      if (c == static_cast<std::size_t>(src)) continue;
      if (members[c].size() >= static_cast<std::size_t>(cap)) continue;
      if (dest < 0 ||
          members[c].size() < members[static_cast<std::size_t>(dest)].size())
        dest = static_cast<int>(c);
    }
    if (dest >= 0)
      members[static_cast<std::size_t>(dest)].push_back(moved);
    else
      members.push_back({moved});
  }

  ClusterAssignment out;
  out.members = std::move(members);
  for (auto& m : out.members) std::sort(m.begin(), m.end());
  out.k = static_cast<int>(out.members.size());
  for (const auto& m : out.members)
    out.centroids.push_back(detail::mean_point(points, m));
  detail::validate_partition(out, points.size());
  return out;
}

}  // namespace qctsp

#endif  // QCTSP_CLUSTER_HPP
