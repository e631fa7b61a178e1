#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "agdn/checkpoint.hpp"
#include "agdn/dataset.hpp"
#include "agdn/verify.hpp"

namespace agdn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kRunKeys = {
    "dataset", "out", "log", "seed", "epochs", "learning_rate", "eval_every", "patience",
    "variant", "layers", "hops", "heads", "hidden_dim", "dropout", "input_drop", "attn_drop",
    "use_labels", "hop_attn_drop", "leaky_slope"};

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

const std::vector<bool>& split_mask(const Dataset& ds, const std::string& split) {
  if (split == "train") return ds.train_mask;
  if (split == "valid") return ds.valid_mask;
  if (split == "test") return ds.test_mask;
  throw ConfigError("unknown split '" + split + "' (train, valid, test)");
}

// Flags shared by train and verify; unset flags leave the config alone.
struct ModelFlags {
  std::optional<std::uint64_t> seed;
  std::optional<index_t> epochs, layers, hops, heads;
  std::optional<double> lr;
  std::optional<std::string> variant;
  bool use_labels = false;

  void add_to(CLI::App& app) {
    app.add_option("--seed", seed, "Seed for every random draw");
    app.add_option("--epochs", epochs, "Training epochs");
    app.add_option("--lr", lr, "SGD learning rate");
    app.add_option("--layers", layers, "Number of layers");
    app.add_option("--hops", hops, "Hops per layer");
    app.add_option("--heads", heads, "Attention heads per layer");
    app.add_option("--variant", variant, "gcn-ha or gat-ha")
        ->check(CLI::IsMember({"gcn-ha", "gat-ha"}));
    app.add_flag("--use-labels", use_labels, "Append masked one-hot labels to the input");
  }

  void apply(RunConfig& rc) const {
    if (seed) rc.train.seed = *seed;
    if (epochs) rc.train.epochs = *epochs;
    if (lr) rc.train.learning_rate = *lr;
    if (layers) rc.model.layers = *layers;
    if (hops) rc.model.hops = *hops;
    if (heads) rc.model.heads = *heads;
    if (variant) rc.model.variant = parse_variant(*variant);
    if (use_labels) rc.model.use_labels = true;
  }
};

void bind_dataset(RunConfig& rc, const Dataset& ds) {
  rc.model.input_dim = ds.features.cols;
  rc.model.num_classes = ds.num_classes;
}

int cmd_train(RunConfig rc, std::ostream& out) {
  if (rc.dataset.empty()) throw ConfigError("train: no dataset (set \"dataset\" or --dataset)");
  const Dataset ds = load_dataset(rc.dataset);
  bind_dataset(rc, ds);
  rc.validate();

  fs::create_directories(rc.out);
  const fs::path log_path = rc.log ? *rc.log : rc.out / "metrics.jsonl";
  std::ofstream log(log_path);
  if (!log) throw std::runtime_error("cannot write " + log_path.string());

  std::string log_text;
  const auto start = std::chrono::steady_clock::now();
  TrainResult res = train(ds, rc.model, rc.train, [&](const EpochRecord& r) {
    const std::string line = r.to_json().dump() + "\n";
    log << line << std::flush;
    log_text += line;
  });
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path ckpt = rc.out / "checkpoint.bin";
  save_checkpoint(ckpt, rc.model, res.params);

  const Metrics& m = res.metrics;
  json summary = {{"best_epoch", m.best_epoch},
                  {"best_valid_acc", m.best_valid_acc},
                  {"test_acc", m.test_acc_at_best},
                  {"train_acc", m.train_acc_at_best},
                  {"final_train_acc", m.records.empty() ? 0.0 : m.records.back().train_acc},
                  {"epochs_run", m.records.empty() ? 0 : m.records.back().epoch},
                  {"metrics_digest", to_hex(fnv1a64(log_text.data(), log_text.size()))},
                  {"config", rc.to_json()},
                  {"dataset_digest", dataset_digest(rc.dataset)},
                  {"checkpoint", ckpt.string()},
                  {"metrics_log", log_path.string()},
                  {"wall_time_s", wall}};
  write_json(rc.out / "summary.json", summary);
  out << summary.dump() << '\n';
  return kOk;
}

int cmd_eval(const fs::path& ckpt_path, fs::path dataset, const std::string& split,
             std::ostream& out) {
  if (!fs::exists(ckpt_path)) throw std::runtime_error("checkpoint not found: " + ckpt_path.string());
  if (dataset.empty()) {
    const fs::path summary = ckpt_path.parent_path() / "summary.json";
    if (!fs::exists(summary))
      throw ConfigError("eval: no --dataset given and no summary.json next to the checkpoint");
    dataset = json::parse(read_file(summary)).at("config").at("dataset").get<std::string>();
  }
  Checkpoint ck = load_checkpoint(ckpt_path);
  const Dataset ds = load_dataset(dataset);
  if (ds.features.cols != ck.config.input_dim || ds.num_classes != ck.config.num_classes)
    throw std::runtime_error("dataset " + dataset.string() + " does not match the checkpoint (" +
                             std::to_string(ds.features.cols) + " features, " +
                             std::to_string(ds.num_classes) + " classes vs " +
                             std::to_string(ck.config.input_dim) + ", " +
                             std::to_string(ck.config.num_classes) + ")");
  const double acc = evaluate(ds, ck.params, ck.config, split_mask(ds, split));
  out << json{{"split", split},
              {"accuracy", acc},
              {"checkpoint", ckpt_path.string()},
              {"config_digest", ck.config_digest}}
             .dump()
      << '\n';
  return kOk;
}

void dump_csv(const fs::path& path, const Tensor& w) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "node";
  for (index_t k = 0; k < w.cols(); ++k) out << ",hop" << k;
  out << '\n' << std::setprecision(9);
  for (index_t i = 0; i < w.rows(); ++i) {
    out << i;
    for (index_t k = 0; k < w.cols(); ++k) out << ',' << w.at(i, k);
    out << '\n';
  }
}

// Layer-0, head-0 transition and hop attention of a model in eval mode.
void dump_inspection(const RunConfig& base, const fs::path& ckpt_path, const fs::path& dataset,
                     const std::string& transition_path, const std::string& hop_path) {
  Dataset ds;
  ModelConfig cfg = base.model;
  ModelParams params;
  if (!ckpt_path.empty()) {
    Checkpoint ck = load_checkpoint(ckpt_path);
    if (dataset.empty()) throw ConfigError("verify: --checkpoint needs --dataset");
    ds = load_dataset(dataset);
    cfg = ck.config;
    params = std::move(ck.params);
  } else {
    if (!dataset.empty()) {
      ds = load_dataset(dataset);
    } else {
      SbmParams sp;
      sp.num_nodes = 60;
      sp.seed = base.train.seed;
      ds = synth_sbm(sp);
    }
    cfg.input_dim = ds.features.cols;
    cfg.num_classes = ds.num_classes;
    cfg.hidden_dim = std::min<index_t>(cfg.hidden_dim, 16);
    cfg.validate();
    params = init_params(cfg, base.train.seed);
  }
  const GraphContext ctx = GraphContext::build(ds.graph);
  Tape tape;
  Rng rng(base.train.seed);
  ModelTrace trace;
  Tensor input = to_tensor(cfg.use_labels
                               ? augment_with_labels(ds.features, ds.labels, ds.num_classes,
                                                     ds.train_mask)
                               : ds.features);
  forward(tape, ctx, input, params, cfg, Mode::eval, rng, &trace);
  const LayerTrace& first = trace.layers.at(0);
  if (!transition_path.empty()) {
    std::ofstream out(transition_path);
    if (!out) throw std::runtime_error("cannot write " + transition_path);
    first.transitions.at(0).write_coordinates(out);
  }
  if (!hop_path.empty()) dump_csv(hop_path, first.attention.at(0).weights);
}

}  // namespace

void RunConfig::merge(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kRunKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");

  std::string s;
  if (j.contains("dataset")) take(j, "dataset", s), dataset = s;
  if (j.contains("out")) take(j, "out", s), out = s;
  if (j.contains("log")) take(j, "log", s), log = fs::path(s);
  take(j, "seed", train.seed);
  take(j, "epochs", train.epochs);
  take(j, "learning_rate", train.learning_rate);
  take(j, "eval_every", train.eval_every);
  if (j.contains("patience")) {
    if (j["patience"].is_null()) {
      train.patience.reset();
    } else {
      index_t p = 0;
      take(j, "patience", p);
      train.patience = p;
    }
  }
  if (j.contains("variant")) {
    take(j, "variant", s);
    try {
      model.variant = parse_variant(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  take(j, "layers", model.layers);
  take(j, "hops", model.hops);
  take(j, "heads", model.heads);
  take(j, "hidden_dim", model.hidden_dim);
  take(j, "dropout", model.dropout);
  take(j, "input_drop", model.input_drop);
  take(j, "attn_drop", model.attn_drop);
  take(j, "use_labels", model.use_labels);
  take(j, "hop_attn_drop", model.hop_attn_drop);
  take(j, "leaky_slope", model.leaky_slope);
}

void RunConfig::validate() const {
  try {
    model.validate();
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json RunConfig::to_json() const {
  json j = model.to_json();
  const json t = train.to_json();
  for (const auto& [k, v] : t.items()) j[k] = v;
  j["dataset"] = dataset.string();
  j["out"] = out.string();
  j["log"] = log ? json(log->string()) : json(nullptr);
  return j;
}

RunConfig load_run_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  RunConfig rc;
  rc.merge(j);
  return rc;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive graph diffusion networks with hop-wise attention", "agdn"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Package raw files as a dataset directory");
  std::string edges, features, labels, masks, ingest_out;
  ingest->add_option("--edges", edges, "Edge list, one `src dst` per line")->required();
  ingest->add_option("--features", features, "N x d f32 matrix (with .json sidecar)")->required();
  ingest->add_option("--labels", labels, "N x 1 f32 label matrix, -1 = unlabeled")->required();
  ingest->add_option("--masks", masks, "Directory with train.txt, valid.txt, test.txt")->required();
  ingest->add_option("--out", ingest_out, "Output dataset directory")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a stochastic block model dataset");
  SbmParams sbm;
  std::string synth_out;
  synth->add_option("--nodes", sbm.num_nodes, "Number of nodes")->capture_default_str();
  synth->add_option("--classes", sbm.num_classes, "Number of blocks")->capture_default_str();
  synth->add_option("--p-in", sbm.p_in, "Within-block edge probability")->capture_default_str();
  synth->add_option("--p-out", sbm.p_out, "Between-block edge probability")->capture_default_str();
  synth->add_option("--feature-dim", sbm.feature_dim, "Feature width")->capture_default_str();
  synth->add_option("--noise", sbm.feature_noise, "Feature noise std")->capture_default_str();
  synth->add_option("--seed", sbm.seed, "Seed")->capture_default_str();
  synth->add_option("--out", synth_out, "Output dataset directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model and write checkpoint and metrics");
  std::string config_path, dataset_flag, log_flag, out_flag;
  ModelFlags train_flags;
  train_cmd->add_option("--config", config_path, "JSON run config");
  train_cmd->add_option("--dataset", dataset_flag, "Dataset directory");
  train_cmd->add_option("--log", log_flag, "Metrics log (JSON lines)");
  train_cmd->add_option("--out", out_flag, "Output directory");
  train_flags.add_to(*train_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Accuracy of a checkpoint on one split");
  std::string ckpt_path, eval_dataset, split = "test";
  eval_cmd->add_option("--checkpoint", ckpt_path, "checkpoint.bin")->required();
  eval_cmd->add_option("--dataset", eval_dataset, "Dataset directory (default: from summary.json)");
  eval_cmd->add_option("--split", split, "train, valid or test")
      ->check(CLI::IsMember({"train", "valid", "test"}))
      ->capture_default_str();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle checks and print a report");
  std::string scale = "small", dump_transition, dump_hops, verify_ckpt, verify_dataset,
              verify_config;
  bool inject_fault = false;
  ModelFlags verify_flags;
  verify_cmd->add_option("--scale", scale, "small or full")
      ->check(CLI::IsMember({"small", "full"}))
      ->capture_default_str();
  verify_cmd->add_flag("--inject-fault", inject_fault, "Perturb one attention weight");
  verify_cmd->add_option("--dump-transition", dump_transition, "Write layer-0 T as `i j w` lines");
  verify_cmd->add_option("--dump-hop-attention", dump_hops, "Write layer-0 hop attention as CSV");
  verify_cmd->add_option("--checkpoint", verify_ckpt, "Inspect a trained model instead");
  verify_cmd->add_option("--dataset", verify_dataset, "Dataset for the dumps");
  verify_cmd->add_option("--config", verify_config, "JSON run config for the dumps");
  verify_flags.add_to(*verify_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  }

  try {
    if (*ingest) {
      Dataset ds = ingest_dataset(edges, features, labels, masks);
      save_dataset(ds, ingest_out);
      out << json{{"out", ingest_out},
                  {"num_nodes", ds.num_nodes()},
                  {"num_edges", ds.graph.num_edges()},
                  {"digest", dataset_digest(ingest_out)}}
                 .dump()
          << '\n';
      return kOk;
    }
    if (*synth) {
      Dataset ds = synth_sbm(sbm);
      save_dataset(ds, synth_out);
      out << json{{"out", synth_out},
                  {"num_nodes", ds.num_nodes()},
                  {"num_edges", ds.graph.num_edges()},
                  {"digest", dataset_digest(synth_out)}}
                 .dump()
          << '\n';
      return kOk;
    }
    if (*train_cmd) {
      RunConfig rc = config_path.empty() ? RunConfig{} : load_run_config(config_path);
      if (!dataset_flag.empty()) rc.dataset = dataset_flag;
      if (!log_flag.empty()) rc.log = fs::path(log_flag);
      if (!out_flag.empty()) rc.out = out_flag;
      train_flags.apply(rc);
      return cmd_train(rc, out);
    }
    if (*eval_cmd) return cmd_eval(ckpt_path, eval_dataset, split, out);
    if (*verify_cmd) {
      RunConfig rc = verify_config.empty() ? RunConfig{} : load_run_config(verify_config);
      verify_flags.apply(rc);
      verify::Options opts;
      opts.full = scale == "full";
      opts.inject_fault = inject_fault;
      if (verify_flags.seed) opts.seed = *verify_flags.seed;
      if (!dump_transition.empty() || !dump_hops.empty())
        dump_inspection(rc, verify_ckpt, verify_dataset, dump_transition, dump_hops);
      const auto results = verify::run_all(opts);
      verify::print_report(out, results);
      return verify::all_passed(results) ? kOk : kVerifyFailed;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what();
    if (e.line()) err << " (line " << e.line() << ")";
    err << '\n';
    return kRuntime;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kRuntime;
}

}  // namespace agdn::cli
