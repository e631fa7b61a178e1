#include "agdn/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace agdn {

void Dataset::validate() const {
  const auto n = static_cast<std::size_t>(graph.num_nodes());
  if (features.rows != graph.num_nodes())
    throw std::invalid_argument("dataset: feature rows " + std::to_string(features.rows) +
                                " != num_nodes " + std::to_string(n));
  if (features.values.size() != static_cast<std::size_t>(features.rows * features.cols))
    throw std::invalid_argument("dataset: feature payload size mismatch");
  if (labels.size() != n) throw std::invalid_argument("dataset: label count != num_nodes");
  if (train_mask.size() != n || valid_mask.size() != n || test_mask.size() != n)
    throw std::invalid_argument("dataset: mask length != num_nodes");
  if (num_classes < 1) throw std::invalid_argument("dataset: num_classes must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    int hits = int(train_mask[i]) + int(valid_mask[i]) + int(test_mask[i]);
    if (hits > 1)
      throw std::invalid_argument("dataset: node " + std::to_string(i) + " is in more than one split");
    if (labels[i] < -1 || labels[i] >= num_classes)
      throw std::invalid_argument("dataset: label of node " + std::to_string(i) + " out of range");
    if (train_mask[i] && labels[i] < 0)
      throw std::invalid_argument("dataset: training node " + std::to_string(i) + " has no label");
  }
}

std::vector<index_t> mask_to_ids(const std::vector<bool>& mask) {
  std::vector<index_t> ids;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) ids.push_back(static_cast<index_t>(i));
  return ids;
}

Dataset synth_sbm(const SbmParams& p) {
  if (p.num_classes < 2) throw std::invalid_argument("synth_sbm: need at least 2 classes");
  if (p.num_nodes < p.num_classes) throw std::invalid_argument("synth_sbm: fewer nodes than classes");
  if (!(p.p_out >= 0.0 && p.p_out < p.p_in && p.p_in <= 1.0))
    throw std::invalid_argument("synth_sbm: require 0 <= p_out < p_in <= 1");
  if (p.feature_dim < p.num_classes)
    throw std::invalid_argument("synth_sbm: feature_dim must be >= num_classes");
  if (p.feature_noise < 0.0) throw std::invalid_argument("synth_sbm: negative feature_noise");

  const index_t n = p.num_nodes;
  const index_t c = p.num_classes;
  std::mt19937_64 rng(p.seed);

  Dataset ds;
  ds.num_classes = p.num_classes;
  ds.labels.resize(n);
  for (index_t i = 0; i < n; ++i) ds.labels[i] = static_cast<std::int32_t>(i * c / n);

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::pair<index_t, index_t>> edges;
  for (index_t i = 0; i < n; ++i)
    for (index_t j = i + 1; j < n; ++j) {
      double prob = ds.labels[i] == ds.labels[j] ? p.p_in : p.p_out;
      if (coin(rng) < prob) edges.emplace_back(i, j);
    }
  ds.graph = Graph::from_edges(n, edges);

  std::normal_distribution<double> noise(0.0, 1.0);
  ds.features.rows = n;
  ds.features.cols = p.feature_dim;
  ds.features.values.resize(n * p.feature_dim);
  for (index_t i = 0; i < n; ++i)
    for (index_t k = 0; k < p.feature_dim; ++k) {
      double mean = k == ds.labels[i] ? 1.0 : 0.0;
      ds.features.at(i, k) = static_cast<float>(mean + p.feature_noise * noise(rng));
    }

  std::vector<index_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const index_t n_train = n * 6 / 10;
  const index_t n_valid = n * 2 / 10;
  ds.train_mask.assign(n, false);
  ds.valid_mask.assign(n, false);
  ds.test_mask.assign(n, false);
  for (index_t r = 0; r < n; ++r) {
    index_t node = order[r];
    if (r < n_train)
      ds.train_mask[node] = true;
    else if (r < n_train + n_valid)
      ds.valid_mask[node] = true;
    else
      ds.test_mask[node] = true;
  }
  return ds;
}

}  // namespace agdn
