// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_FOREST_HPP
#define QCTSP_FOREST_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qctsp/rng.hpp"
#include "qctsp/tour.hpp"

namespace qctsp {

struct ForestConfig {
  int n_trees = 300;
  int max_depth = 30;
  int min_samples_split = 2;
  std::size_t max_samples = 10000;   // training-set cap, applied before bagging
  double feature_subsample = 1.0;    // fraction of features scanned per split
  std::uint64_t seed = 0;

  void validate() const {
    if (n_trees < 1) throw std::invalid_argument("ForestConfig: n_trees must be >= 1");
    if (max_depth < 1) throw std::invalid_argument("ForestConfig: max_depth must be >= 1");
    if (min_samples_split < 2)
      throw std::invalid_argument("ForestConfig: min_samples_split must be >= 2");
    if (max_samples < 1)
      throw std::invalid_argument("ForestConfig: max_samples must be >= 1");
    if (!(feature_subsample > 0.0 && feature_subsample <= 1.0))
      throw std::invalid_argument("ForestConfig: feature_subsample must be in (0, 1]");
  }
};

struct TrainingSet {
  std::vector<std::vector<double>> features;
  std::vector<double> labels;

  void add(std::vector<double> row, double label) {
    if (!features.empty() && row.size() != features.front().size())
      throw std::invalid_argument("TrainingSet: feature dimensionality mismatch");
    features.push_back(std::move(row));
    labels.push_back(label);
  }

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.empty() ? 0 : features.front().size(); }
};

struct RegressionTree {
  struct Node {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;     // leaf mean
  };
  std::vector<Node> nodes;

  double predict(const std::vector<double>& x) const {
    int id = 0;
    while (nodes[static_cast<std::size_t>(id)].feature >= 0) {
      const auto& nd = nodes[static_cast<std::size_t>(id)];
      id = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left
                                                                   : nd.right;
    }
    return nodes[static_cast<std::size_t>(id)].value;
  }
};

struct Forest {
  std::vector<RegressionTree> trees;
  std::size_t n_features = 0;

  double predict(const std::vector<double>& x) const {
    if (trees.empty()) throw std::logic_error("Forest: not trained");
    if (x.size() != n_features)
      throw std::invalid_argument("Forest: expected " + std::to_string(n_features) +
                                  " features, got " + std::to_string(x.size()));
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict(x);
    return sum / static_cast<double>(trees.size());
  }
};

namespace detail {

struct SplitScratch {
  std::vector<int> order;
  std::vector<double> prefix_sum;
  std::vector<double> prefix_sq;
};

// CART split maximizing MSE reduction; thresholds are midpoints between
// adjacent sorted distinct values. Ties resolve to the lowest feature
// index, then the lowest threshold.
inline bool best_split(const TrainingSet& data, const std::vector<int>& rows,
                       const std::vector<int>& feature_pool, SplitScratch& scratch,
                       int& out_feature, double& out_threshold) {
  const std::size_t n = rows.size();
  double total_sum = 0.0, total_sq = 0.0;
  for (int r : rows) {
    const double y = data.labels[static_cast<std::size_t>(r)];
    total_sum += y;
    total_sq += y * y;
  }
  const double parent_sse = total_sq - total_sum * total_sum / static_cast<double>(n);

  double best_gain = 0.0;
  bool found = false;
  for (int f : feature_pool) {
    auto& order = scratch.order;
    order.assign(rows.begin(), rows.end());
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double va = data.features[static_cast<std::size_t>(a)][static_cast<std::size_t>(f)];
      const double vb = data.features[static_cast<std::size_t>(b)][static_cast<std::size_t>(f)];
      if (va != vb) return va < vb;
      return a < b;
    });

    double left_sum = 0.0, left_sq = 0.0;
    for (std::size_t pos = 0; pos + 1 < n; ++pos) {
      const double y = data.labels[static_cast<std::size_t>(order[pos])];
      left_sum += y;
      left_sq += y * y;
      const double v = data.features[static_cast<std::size_t>(order[pos])]
                                    [static_cast<std::size_t>(f)];
      const double v_next = data.features[static_cast<std::size_t>(order[pos + 1])]
                                         [static_cast<std::size_t>(f)];
      if (v == v_next) continue;
      const double nl = static_cast<double>(pos + 1);
      const double nr = static_cast<double>(n - pos - 1);
      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double sse = (left_sq - left_sum * left_sum / nl) +
                         (right_sq - right_sum * right_sum / nr);
      const double gain = parent_sse - sse;
      if (gain > best_gain + 1e-12 * (1.0 + std::abs(best_gain))) {
        best_gain = gain;
        out_feature = f;
        out_threshold = (v + v_next) / 2.0;
        found = true;
      }
    }
  }
  return found && best_gain > 0.0;
}

inline int grow_tree(RegressionTree& tree, const TrainingSet& data,
                     std::vector<int> rows, int depth, const ForestConfig& cfg,
                     Rng& rng, SplitScratch& scratch) {
  double sum = 0.0;
  for (int r : rows) sum += data.labels[static_cast<std::size_t>(r)];
  const double mean = sum / static_cast<double>(rows.size());

  bool pure = true;
  for (int r : rows)
    if (data.labels[static_cast<std::size_t>(r)] !=
        data.labels[static_cast<std::size_t>(rows.front())]) {
      pure = false;
      break;
    }

  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back({});
  tree.nodes[static_cast<std::size_t>(id)].value = mean;

  if (pure || depth >= cfg.max_depth ||
      rows.size() < static_cast<std::size_t>(cfg.min_samples_split))
    return id;

  // Feature pool for this split.
  const int dim = static_cast<int>(data.dim());
  std::vector<int> pool(static_cast<std::size_t>(dim));
  for (int f = 0; f < dim; ++f) pool[static_cast<std::size_t>(f)] = f;
  if (cfg.feature_subsample < 1.0) {
    const int want = std::max(1, static_cast<int>(std::llround(
                                     cfg.feature_subsample * dim)));
    for (int i = 0; i < want; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) +
          static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(dim - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(want));
    std::sort(pool.begin(), pool.end());
  }

  int feature = -1;
  double threshold = 0.0;
  if (!best_split(data, rows, pool, scratch, feature, threshold)) return id;

  std::vector<int> left, right;
  for (int r : rows) {
    if (data.features[static_cast<std::size_t>(r)][static_cast<std::size_t>(feature)] <=
        threshold)
      left.push_back(r);
    else
      right.push_back(r);
  }
  if (left.empty() || right.empty()) return id;

  rows.clear();
  rows.shrink_to_fit();
  const int left_id = grow_tree(tree, data, std::move(left), depth + 1, cfg, rng, scratch);
  const int right_id = grow_tree(tree, data, std::move(right), depth + 1, cfg, rng, scratch);
  auto& node = tree.nodes[static_cast<std::size_t>(id)];
  node.feature = feature;
  node.threshold = threshold;
  node.left = left_id;
  node.right = right_id;
  return id;
}

}  // namespace detail

// Bootstrap-aggregated CART regression. The training set is subsampled
// without replacement down to cfg.max_samples when larger; each tree then
// fits a with-replacement resample of the same size.
inline Forest train_forest(const TrainingSet& data, const ForestConfig& cfg,
                           Rng& rng) {
  cfg.validate();
  if (data.size() < 2)
    throw std::invalid_argument("train_forest: need at least 2 rows");
  for (const auto& row : data.features)
    if (row.size() != data.dim())
      throw std::invalid_argument("train_forest: feature dimensionality mismatch");

  // Cap the working set (partial Fisher-Yates keeps the draw deterministic).
  std::vector<int> base(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) base[i] = static_cast<int>(i);
  if (data.size() > cfg.max_samples) {
    for (std::size_t i = 0; i < cfg.max_samples; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(rng.next_below(data.size() - i));
      std::swap(base[i], base[j]);
    }
    base.resize(cfg.max_samples);
  }

  std::vector<std::uint64_t> tree_seeds(static_cast<std::size_t>(cfg.n_trees));
  for (auto& s : tree_seeds) s = rng.next_u64();

  Forest forest;
  forest.n_features = data.dim();
  forest.trees.resize(static_cast<std::size_t>(cfg.n_trees));
  for (int t = 0; t < cfg.n_trees; ++t) {
    Rng tree_rng(tree_seeds[static_cast<std::size_t>(t)]);
    std::vector<int> rows(base.size());
    for (auto& r : rows)
      r = base[static_cast<std::size_t>(tree_rng.next_below(base.size()))];
    detail::SplitScratch scratch;
    detail::grow_tree(forest.trees[static_cast<std::size_t>(t)], data,
                      std::move(rows), 0, cfg, tree_rng, scratch);
  }
  return forest;
}

// The n consecutive-edge distances of a closed tour, including the closing
// edge, in tour order. Their sum is the tour cost.
inline std::vector<double> extract_features(const Tour& t, const DistanceMatrix& dm) {
  if (!t.closed)
    throw std::invalid_argument("extract_features: tour must be closed");
  if (t.order.size() != dm.size())
    throw std::invalid_argument("extract_features: tour must cover all cities");
  validate_tour(t, dm.size());
  const std::size_t n = t.order.size();
  std::vector<double> features(n);
  for (std::size_t i = 0; i < n; ++i)
    features[i] = dm.at(static_cast<std::size_t>(t.order[i]),
                        static_cast<std::size_t>(t.order[(i + 1) % n]));
  return features;
}

using CostPredictor = std::function<double(const std::vector<double>&)>;

// Bounded predictor-guided 2-opt: each round scans every valid (i, j)
// swap and applies the one with the lowest predicted cost, provided it
// strictly beats the current tour's prediction. The start city never moves.
inline Tour ml_refine(const Tour& t, const CostPredictor& predictor,
                      const DistanceMatrix& dm, int max_rounds = 3) {
  if (max_rounds < 0)
    throw std::invalid_argument("ml_refine: max_rounds must be >= 0");
  Tour current = t;
  double current_pred = predictor(extract_features(current, dm));
  const std::size_t len = current.order.size();
  for (int round = 0; round < max_rounds; ++round) {
    double best_pred = current_pred;
    Tour best_tour;
    bool found = false;
    for (std::size_t i = 1; i + 1 < len; ++i)
      for (std::size_t j = i + 1; j < len; ++j) {
        Tour cand = two_opt_swap(current, i, j);
        const double pred = predictor(extract_features(cand, dm));
        if (pred < best_pred) {  // strict: ties keep the current tour
          best_pred = pred;
          best_tour = std::move(cand);
          found = true;
        }
      }
    if (!found) break;
    current = std::move(best_tour);
    current_pred = best_pred;
  }
  return current;
}

// Optional model dump: node arrays per tree.
inline nlohmann::ordered_json forest_to_json(const Forest& forest) {
  nlohmann::ordered_json j;
  j["n_features"] = forest.n_features;
  auto& trees = j["trees"] = nlohmann::ordered_json::array();
  for (const auto& tree : forest.trees) {
    nlohmann::ordered_json t;
    auto& nodes = t["nodes"] = nlohmann::ordered_json::array();
    for (const auto& nd : tree.nodes)
      nodes.push_back({{"feature", nd.feature},
                       {"threshold", nd.threshold},
                       {"left", nd.left},
                       {"right", nd.right},
                       {"value", nd.value}});
    trees.push_back(std::move(t));
  }
  return j;
}

inline Forest forest_from_json(const nlohmann::json& j) {
  Forest forest;
  forest.n_features = j.at("n_features").get<std::size_t>();
  for (const auto& t : j.at("trees")) {
    RegressionTree tree;
    for (const auto& nd : t.at("nodes"))
      tree.nodes.push_back({nd.at("feature").get<int>(),
                            nd.at("threshold").get<double>(),
                            nd.at("left").get<int>(), nd.at("right").get<int>(),
                            nd.at("value").get<double>()});
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

}  // namespace qctsp

#endif  // QCTSP_FOREST_HPP
