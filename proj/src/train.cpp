#include "agdn/train.hpp"

#include <cmath>
#include <sstream>

namespace agdn {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning_rate must be a non-negative number");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
  if (patience && *patience < 1) throw std::invalid_argument("patience must be >= 1");
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j = {{"learning_rate", learning_rate},
                      {"epochs", epochs},
                      {"seed", seed},
                      {"eval_every", eval_every}};
  j["patience"] = patience ? nlohmann::json(*patience) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json EpochRecord::to_json() const {
  return {{"epoch", epoch},         {"train_loss", train_loss}, {"train_acc", train_acc},
          {"valid_acc", valid_acc}, {"test_acc", test_acc}};
}

double accuracy(const Tensor& logits, std::span<const std::int32_t> labels,
                const std::vector<bool>& mask) {
  if (static_cast<index_t>(labels.size()) != logits.rows() ||
      static_cast<index_t>(mask.size()) != logits.rows())
    throw ShapeError("accuracy: labels/mask length != rows");
  index_t total = 0, correct = 0;
  for (index_t i = 0; i < logits.rows(); ++i) {
    if (!mask[i]) continue;
    index_t best = 0;
    for (index_t k = 1; k < logits.cols(); ++k)
      if (logits.at(i, k) > logits.at(i, best)) best = k;
    ++total;
    correct += best == labels[i];
  }
  if (total == 0) throw std::invalid_argument("accuracy: empty split");
  return static_cast<double>(correct) / static_cast<double>(total);
}

Tensor predict(const Dataset& ds, const GraphContext& ctx, ModelParams& params,
               const ModelConfig& mcfg) {
  Tape tape;
  Rng unused(0);
  return forward(tape, ds, ctx, params, mcfg, Mode::eval, unused, ds.train_mask);
}

double evaluate(const Dataset& ds, ModelParams& params, const ModelConfig& mcfg,
                const std::vector<bool>& split) {
  GraphContext ctx = GraphContext::build(ds.graph);
  return accuracy(predict(ds, ctx, params, mcfg), ds.labels, split);
}

void sgd_step(std::span<Tensor> params, double learning_rate) {
  for (auto& p : params) {
    if (!p.has_grad()) continue;
    for (double g : p.grad())
      if (!std::isfinite(g)) throw DivergenceError("sgd_step: non-finite gradient");
  }
  for (auto& p : params) {
    if (!p.has_grad()) continue;
    auto v = p.values();
    auto g = p.grad();
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = static_cast<float>(v[i] - learning_rate * g[i]);
  }
}

namespace {

std::vector<Tensor> tensors_of(const ModelParams& params) {
  std::vector<Tensor> out;
  for (auto& [name, t] : params.named_parameters()) out.push_back(t);
  return out;
}

void check_dataset(const Dataset& ds) {
  ds.validate();
  for (const auto* mask : {&ds.train_mask, &ds.valid_mask, &ds.test_mask})
    if (mask_to_ids(*mask).empty()) throw std::invalid_argument("train: a split mask is empty");
}

// Tracks the earliest epoch with the best valid accuracy.
struct Selector {
  Metrics& m;
  index_t since_improvement = 0;

  bool update(const EpochRecord& r) {
    m.records.push_back(r);
    if (m.best_epoch == 0 || r.valid_acc > m.best_valid_acc) {
      m.best_epoch = r.epoch;
      m.best_valid_acc = r.valid_acc;
      m.test_acc_at_best = r.test_acc;
      m.train_acc_at_best = r.train_acc;
      since_improvement = 0;
      return true;
    }
    ++since_improvement;
    return false;
  }
};

}  // namespace

TrainResult train(const Dataset& ds, const ModelConfig& mcfg, const TrainConfig& tcfg,
                  const EpochCallback& on_epoch, const InputObserver& on_input) {
  mcfg.validate();
  tcfg.validate();
  check_dataset(ds);
  if (mcfg.input_dim != ds.features.cols || mcfg.num_classes != ds.num_classes)
    throw std::invalid_argument("train: model input_dim/num_classes do not match the dataset");

  const GraphContext ctx = GraphContext::build(ds.graph);
  TrainResult result;
  ModelParams params = init_params(mcfg, tcfg.seed);
  std::vector<Tensor> trainable = tensors_of(params);
  Rng rng(tcfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::bernoulli_distribution expose(0.5);
  Selector selector{result.metrics};
  Tape tape;

  for (index_t epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    std::vector<bool> exposed(ds.num_nodes(), false);
    std::vector<bool> loss_mask = ds.train_mask;
    if (mcfg.use_labels) {
      for (index_t i = 0; i < ds.num_nodes(); ++i)
        if (ds.train_mask[i] && expose(rng)) {
          exposed[i] = true;
          loss_mask[i] = false;
        }
      // Keep at least one supervised node.
      if (mask_to_ids(loss_mask).empty()) {
        index_t first = mask_to_ids(ds.train_mask).front();
        exposed[first] = false;
        loss_mask[first] = true;
      }
    }

    tape.reset();
    for (auto& p : trainable) p.zero_grad();
    const FeatureMatrix input = mcfg.use_labels
                                    ? augment_with_labels(ds.features, ds.labels, ds.num_classes, exposed)
                                    : ds.features;
    if (on_input) on_input(input, exposed);
    Tensor logits = forward(tape, ctx, to_tensor(input), params, mcfg, Mode::train, rng);
    Tensor loss = softmax_cross_entropy(tape, logits, ds.labels, loss_mask);
    const double loss_value = loss.item();
    if (!std::isfinite(loss_value)) {
      std::ostringstream msg;
      msg << "training diverged at epoch " << epoch << ": loss = " << loss_value;
      throw DivergenceError(msg.str());
    }
    tape.backward(loss);
    try {
      sgd_step(trainable, tcfg.learning_rate);
    } catch (const DivergenceError& e) {
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }

    if (epoch % tcfg.eval_every != 0 && epoch != tcfg.epochs) continue;
    Tensor eval_logits = predict(ds, ctx, params, mcfg);
    EpochRecord rec{epoch, loss_value, accuracy(eval_logits, ds.labels, ds.train_mask),
                    accuracy(eval_logits, ds.labels, ds.valid_mask),
                    accuracy(eval_logits, ds.labels, ds.test_mask)};
    if (selector.update(rec)) result.params = params.clone();
    if (on_epoch) on_epoch(rec);
    if (tcfg.patience && selector.since_improvement >= *tcfg.patience) break;
  }
  result.final_params = std::move(params);
  return result;
}

Metrics train_linear_baseline(const Dataset& ds, const TrainConfig& tcfg) {
  tcfg.validate();
  check_dataset(ds);
  const index_t n = ds.num_nodes(), d = ds.features.cols, c = ds.num_classes;

  // Features plus a constant column for the bias.
  Tensor x(n, d + 1);
  for (index_t i = 0; i < n; ++i) {
    for (index_t k = 0; k < d; ++k) x.at(i, k) = ds.features.at(i, k);
    x.at(i, d) = 1.0;
  }
  Rng rng(tcfg.seed);
  const double bound = std::sqrt(6.0 / static_cast<double>(d + 1 + c));
  std::uniform_real_distribution<double> u(-bound, bound);
  Tensor w(d + 1, c, true);
  for (auto& v : w.values()) v = static_cast<float>(u(rng));
  std::vector<Tensor> trainable{w};

  Metrics metrics;
  Selector selector{metrics};
  Tape tape;
  for (index_t epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    tape.reset();
    w.zero_grad();
    Tensor logits = matmul(tape, x, w);
    Tensor loss = softmax_cross_entropy(tape, logits, ds.labels, ds.train_mask);
    if (!std::isfinite(loss.item()))
      throw DivergenceError("linear baseline diverged at epoch " + std::to_string(epoch));
    tape.backward(loss);
    sgd_step(trainable, tcfg.learning_rate);
    if (epoch % tcfg.eval_every != 0 && epoch != tcfg.epochs) continue;

    Tape eval_tape;
    Tensor eval_logits = matmul(eval_tape, x, w.clone());
    EpochRecord rec{epoch, loss.item(), accuracy(eval_logits, ds.labels, ds.train_mask),
                    accuracy(eval_logits, ds.labels, ds.valid_mask),
                    accuracy(eval_logits, ds.labels, ds.test_mask)};
    selector.update(rec);
    if (tcfg.patience && selector.since_improvement >= *tcfg.patience) break;
  }
  return metrics;
}

}  // namespace agdn
