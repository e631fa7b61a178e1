#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "agdn/dataset.hpp"

namespace agdn {

static_assert(std::endian::native == std::endian::little,
              "binary formats are written as raw little-endian payloads");

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kCsrMagic[8] = {'A', 'G', 'D', 'N', 'C', 'S', 'R', '1'};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

fs::path sidecar(const fs::path& path) { return fs::path(path.string() + ".json"); }

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in, const fs::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
    throw ParseError("truncated file " + path.string());
  return value;
}

std::uint64_t file_digest(const fs::path& path, std::uint64_t seed) {
  std::string bytes = read_text(path);
  return fnv1a64(bytes.data(), bytes.size(), seed);
}

const char* kDatasetFiles[] = {"graph.csr", "features.f32", "features.f32.json", "labels.f32",
                               "labels.f32.json", "train.txt", "valid.txt", "test.txt"};

std::uint64_t compute_dir_digest(const fs::path& dir) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* name : kDatasetFiles) {
    h = fnv1a64(name, std::strlen(name), h);
    h = file_digest(dir / name, h);
  }
  return h;
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << value;
  return s.str();
}

void write_f32_matrix(const fs::path& path, index_t rows, index_t cols,
                      const std::vector<float>& values) {
  if (static_cast<index_t>(values.size()) != rows * cols)
    throw std::invalid_argument("write_f32_matrix: payload size != rows*cols");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
  json header = {{"rows", rows}, {"cols", cols}, {"dtype", "f32"}};
  write_text(sidecar(path), header.dump());
}

FeatureMatrix read_f32_matrix(const fs::path& path) {
  json header;
  try {
    header = json::parse(read_text(sidecar(path)));
  } catch (const json::exception& e) {
    throw ParseError("bad header " + sidecar(path).string() + ": " + e.what());
  }
  if (!header.contains("rows") || !header.contains("cols") || header.value("dtype", "") != "f32")
    throw ParseError("header " + sidecar(path).string() + " needs rows, cols and dtype \"f32\"");
  FeatureMatrix m;
  m.rows = header["rows"].get<index_t>();
  m.cols = header["cols"].get<index_t>();
  if (m.rows < 0 || m.cols < 0) throw ParseError("negative shape in " + sidecar(path).string());
  std::string bytes = read_text(path);
  if (bytes.size() != static_cast<std::size_t>(m.rows * m.cols) * sizeof(float))
    throw ParseError(path.string() + ": payload is " + std::to_string(bytes.size()) +
                     " bytes, header implies " +
                     std::to_string(m.rows * m.cols * sizeof(float)));
  m.values.resize(m.rows * m.cols);
  std::memcpy(m.values.data(), bytes.data(), bytes.size());
  return m;
}

void write_mask(const fs::path& path, const std::vector<bool>& mask) {
  std::ostringstream s;
  for (index_t id : mask_to_ids(mask)) s << id << '\n';
  write_text(path, s.str());
}

std::vector<bool> read_mask(const fs::path& path, index_t num_nodes) {
  std::istringstream in(read_text(path));
  std::vector<bool> mask(num_nodes, false);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    index_t id = 0;
    try {
      std::size_t used = 0;
      id = std::stoll(line, &used);
      if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": not a node id", lineno);
    }
    if (id < 0 || id >= num_nodes) throw ParseError(path.string() + ": node id out of range", lineno);
    mask[id] = true;
  }
  return mask;
}

void write_csr(const fs::path& path, const Graph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kCsrMagic, sizeof(kCsrMagic));
  put<std::uint64_t>(out, g.num_nodes());
  put<std::uint64_t>(out, g.num_edges());
  for (index_t v : g.row_offsets()) put<std::uint64_t>(out, v);
  for (index_t v : g.col_indices()) put<std::uint64_t>(out, v);
}

Graph read_csr(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCsrMagic, sizeof(magic)) != 0)
    throw ParseError(path.string() + ": not a CSR dump");
  auto n = static_cast<index_t>(get<std::uint64_t>(in, path));
  auto m = static_cast<index_t>(get<std::uint64_t>(in, path));
  std::vector<index_t> offsets(n + 1), cols(m);
  for (auto& v : offsets) v = static_cast<index_t>(get<std::uint64_t>(in, path));
  for (auto& v : cols) v = static_cast<index_t>(get<std::uint64_t>(in, path));
  try {
    return Graph(n, std::move(offsets), std::move(cols));
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_dataset(const Dataset& ds, const fs::path& dir) {
  ds.validate();
  fs::create_directories(dir);
  write_csr(dir / "graph.csr", ds.graph);
  write_f32_matrix(dir / "features.f32", ds.features.rows, ds.features.cols, ds.features.values);
  std::vector<float> labels(ds.labels.begin(), ds.labels.end());
  write_f32_matrix(dir / "labels.f32", ds.num_nodes(), 1, labels);
  write_mask(dir / "train.txt", ds.train_mask);
  write_mask(dir / "valid.txt", ds.valid_mask);
  write_mask(dir / "test.txt", ds.test_mask);

  json manifest = {
      {"format", "agdn-dataset-1"},
      {"num_nodes", ds.num_nodes()},
      {"num_edges", ds.graph.num_edges()},
      {"feature_dim", ds.features.cols},
      {"num_classes", ds.num_classes},
      {"num_train", mask_to_ids(ds.train_mask).size()},
      {"num_valid", mask_to_ids(ds.valid_mask).size()},
      {"num_test", mask_to_ids(ds.test_mask).size()},
      {"digest", to_hex(compute_dir_digest(dir))},
  };
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string dataset_digest(const fs::path& dir) {
  return json::parse(read_text(dir / "manifest.json")).at("digest").get<std::string>();
}

namespace {

std::vector<std::int32_t> labels_from_matrix(const FeatureMatrix& m, index_t n,
                                             std::int32_t& num_classes) {
  if (m.rows != n || m.cols != 1)
    throw ParseError("labels must be an N x 1 matrix with N=" + std::to_string(n) + ", got " +
                     std::to_string(m.rows) + " x " + std::to_string(m.cols));
  std::vector<std::int32_t> labels(n);
  num_classes = 0;
  for (index_t i = 0; i < n; ++i) {
    float v = m.values[i];
    if (!std::isfinite(v) || v != std::floor(v) || v < -1.0f)
      throw ParseError("label of node " + std::to_string(i) + " is not an integer >= -1");
    labels[i] = static_cast<std::int32_t>(v);
    num_classes = std::max(num_classes, labels[i] + 1);
  }
  return labels;
}

}  // namespace

Dataset load_dataset(const fs::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_text(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw ParseError("bad manifest in " + dir.string() + ": " + e.what());
  }
  std::string expected = manifest.value("digest", "");
  std::string actual = to_hex(compute_dir_digest(dir));
  if (expected != actual)
    throw ParseError(dir.string() + ": content digest mismatch (manifest " + expected +
                     ", files " + actual + ")");

  Dataset ds;
  ds.graph = read_csr(dir / "graph.csr");
  const index_t n = ds.graph.num_nodes();
  ds.features = read_f32_matrix(dir / "features.f32");
  std::int32_t seen_classes = 0;
  ds.labels = labels_from_matrix(read_f32_matrix(dir / "labels.f32"), n, seen_classes);
  ds.num_classes = manifest.value("num_classes", seen_classes);
  ds.train_mask = read_mask(dir / "train.txt", n);
  ds.valid_mask = read_mask(dir / "valid.txt", n);
  ds.test_mask = read_mask(dir / "test.txt", n);
  if (manifest.value("num_nodes", index_t{-1}) != n ||
      manifest.value("num_edges", index_t{-1}) != ds.graph.num_edges())
    throw ParseError(dir.string() + ": manifest counts disagree with graph.csr");
  ds.validate();
  return ds;
}

Dataset ingest_dataset(const fs::path& edge_path, const fs::path& feature_path,
                       const fs::path& label_path, const fs::path& mask_dir) {
  Dataset ds;
  ds.features = read_f32_matrix(feature_path);
  const index_t n = ds.features.rows;
  if (n <= 0) throw ParseError(feature_path.string() + ": feature matrix has no rows");

  FeatureMatrix label_matrix = read_f32_matrix(label_path);
  if (label_matrix.rows != n)
    throw ParseError("node count mismatch: features have " + std::to_string(n) +
                     " rows but labels have " + std::to_string(label_matrix.rows));
  ds.labels = labels_from_matrix(label_matrix, n, ds.num_classes);
  ds.graph = load_edge_list(edge_path, n);
  ds.train_mask = read_mask(mask_dir / "train.txt", n);
  ds.valid_mask = read_mask(mask_dir / "valid.txt", n);
  ds.test_mask = read_mask(mask_dir / "test.txt", n);
  try {
    ds.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("inconsistent inputs: ") + e.what());
  }
  return ds;
}

}  // namespace agdn
