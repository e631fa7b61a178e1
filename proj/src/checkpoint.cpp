#include "agdn/checkpoint.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

namespace agdn {

namespace {

constexpr const char* kMagic = "AGDN-CHECKPOINT";
constexpr const char* kVersion = "1";

struct Slot {
  Tensor tensor;                  // trainable
  std::vector<double>* stats{};   // running statistics
};

std::map<std::string, Slot> slots_of(ModelParams& params) {
  std::map<std::string, Slot> slots;
  for (auto& [name, t] : params.named_parameters()) slots[name].tensor = t;
  for (std::size_t l = 0; l < params.norms.size(); ++l) {
    const std::string prefix = "norm" + std::to_string(l);
    slots[prefix + ".running_mean"].stats = &params.norms[l].running_mean;
    slots[prefix + ".running_var"].stats = &params.norms[l].running_var;
  }
  return slots;
}

void write_record(std::ostream& out, const std::string& name, index_t rows, index_t cols,
                  std::span<const double> values) {
  const auto len = static_cast<std::uint32_t>(name.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(name.data(), len);
  const auto r = static_cast<std::uint64_t>(rows), c = static_cast<std::uint64_t>(cols);
  out.write(reinterpret_cast<const char*>(&r), sizeof(r));
  out.write(reinterpret_cast<const char*>(&c), sizeof(c));
  for (double v : values) {
    const auto f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), sizeof(f));
  }
}

}  // namespace

std::string config_digest(const ModelConfig& cfg) {
  const std::string text = cfg.to_json().dump();
  return to_hex(fnv1a64(text.data(), text.size()));
}

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg,
                     const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << kMagic << ' ' << kVersion << ' ' << config_digest(cfg) << ' ' << cfg.to_json().dump()
      << '\n';
  ModelParams& mutable_params = const_cast<ModelParams&>(params);
  for (auto& [name, slot] : slots_of(mutable_params)) {
    if (slot.stats)
      write_record(out, name, 1, static_cast<index_t>(slot.stats->size()), *slot.stats);
    else
      write_record(out, name, slot.tensor.rows(), slot.tensor.cols(), slot.tensor.values());
  }
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw ParseError(path.string() + ": empty checkpoint");

  std::istringstream hs(header);
  std::string magic, version, digest;
  hs >> magic >> version >> digest;
  std::string config_text;
  std::getline(hs >> std::ws, config_text);
  if (magic != kMagic || version != kVersion)
    throw ParseError(path.string() + ": not an AGDN checkpoint (version " + kVersion + ")");

  Checkpoint ck;
  try {
    ck.config = ModelConfig::from_json(nlohmann::json::parse(config_text));
  } catch (const std::exception& e) {
    throw ParseError(path.string() + ": bad config in header: " + e.what());
  }
  ck.config_digest = config_digest(ck.config);
  if (ck.config_digest != digest)
    throw ParseError(path.string() + ": config digest mismatch (header " + digest + ", computed " +
                     ck.config_digest + ")");

  ck.params = init_params(ck.config, 0);
  auto slots = slots_of(ck.params);
  std::map<std::string, bool> seen;
  while (in.peek() != std::char_traits<char>::eof()) {
    std::uint32_t len = 0;
    std::uint64_t rows = 0, cols = 0;
    if (!in.read(reinterpret_cast<char*>(&len), sizeof(len)) || len > 4096)
      throw ParseError(path.string() + ": corrupt record header");
    std::string name(len, '\0');
    in.read(name.data(), len);
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    if (!in) throw ParseError(path.string() + ": truncated record " + name);
    auto it = slots.find(name);
    if (it == slots.end()) throw ParseError(path.string() + ": unexpected tensor " + name);
    Slot& slot = it->second;
    const index_t want_rows = slot.stats ? 1 : slot.tensor.rows();
    const index_t want_cols =
        slot.stats ? static_cast<index_t>(slot.stats->size()) : slot.tensor.cols();
    if (static_cast<index_t>(rows) != want_rows || static_cast<index_t>(cols) != want_cols)
      throw ParseError(path.string() + ": tensor " + name + " has shape " + std::to_string(rows) +
                       "x" + std::to_string(cols) + ", config implies " +
                       std::to_string(want_rows) + "x" + std::to_string(want_cols));
    std::vector<float> payload(rows * cols);
    if (!in.read(reinterpret_cast<char*>(payload.data()),
                 static_cast<std::streamsize>(payload.size() * sizeof(float))))
      throw ParseError(path.string() + ": truncated payload for " + name);
    std::span<double> dst = slot.stats ? std::span<double>(*slot.stats) : slot.tensor.values();
    for (std::size_t i = 0; i < payload.size(); ++i) dst[i] = payload[i];
    seen[name] = true;
  }
  for (auto& [name, slot] : slots)
    if (!seen.count(name)) throw ParseError(path.string() + ": missing tensor " + name);
  return ck;
}

}  // namespace agdn
