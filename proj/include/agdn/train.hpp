#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "agdn/model.hpp"

namespace agdn {

/// Training produced a non-finite loss or gradient.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  double learning_rate = 0.002;
  index_t epochs = 2000;
  std::uint64_t seed = 0;
  index_t eval_every = 1;
  std::optional<index_t> patience;  // evaluations without valid improvement

  void validate() const;
  nlohmann::json to_json() const;
};

struct EpochRecord {
  index_t epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double valid_acc = 0.0;
  double test_acc = 0.0;

  nlohmann::json to_json() const;
  bool operator==(const EpochRecord&) const = default;
};

struct Metrics {
  std::vector<EpochRecord> records;
  index_t best_epoch = 0;  // earliest epoch with maximal valid accuracy
  double best_valid_acc = 0.0;
  double test_acc_at_best = 0.0;
  double train_acc_at_best = 0.0;

  bool operator==(const Metrics&) const = default;
};

struct TrainResult {
  ModelParams params;  // snapshot taken at best_epoch
  ModelParams final_params;
  Metrics metrics;
};

using EpochCallback = std::function<void(const EpochRecord&)>;
/// Sees the input matrix of every training step and the nodes whose labels it exposes.
using InputObserver = std::function<void(const FeatureMatrix& input, const std::vector<bool>& exposed)>;

/// Full-batch training: each epoch is one forward, masked cross-entropy,
/// backward and SGD step over the whole graph, followed by evaluation every
/// eval_every epochs. With cfg.use_labels, every epoch exposes a Bernoulli(1/2)
/// subset of the training nodes as input labels and computes the loss on the
/// remaining training nodes; evaluation exposes the whole training set.
TrainResult train(const Dataset& ds, const ModelConfig& mcfg, const TrainConfig& tcfg,
                  const EpochCallback& on_epoch = {}, const InputObserver& on_input = {});

/// Argmax accuracy over the masked rows; ties go to the lowest class index.
double accuracy(const Tensor& logits, std::span<const std::int32_t> labels,
                const std::vector<bool>& mask);

/// Eval-mode logits with the whole training set exposed as labels.
Tensor predict(const Dataset& ds, const GraphContext& ctx, ModelParams& params,
               const ModelConfig& mcfg);

double evaluate(const Dataset& ds, ModelParams& params, const ModelConfig& mcfg,
                const std::vector<bool>& split);

/// p <- p - lr * grad for every tensor, stored back at f32 precision. Tensors
/// without a gradient are left as they are.
void sgd_step(std::span<Tensor> params, double learning_rate);

/// Softmax regression on raw features (no graph), trained with the same
/// optimizer, epochs and model selection rule as train().
Metrics train_linear_baseline(const Dataset& ds, const TrainConfig& tcfg);

}  // namespace agdn
