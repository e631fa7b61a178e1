#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "agdn/graph.hpp"

namespace agdn {

/// Row-major N x d matrix of 32-bit features.
struct FeatureMatrix {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<float> values;

  float at(index_t r, index_t c) const { return values[r * cols + c]; }
  float& at(index_t r, index_t c) { return values[r * cols + c]; }
  bool operator==(const FeatureMatrix&) const = default;
};

struct Dataset {
  Graph graph;
  FeatureMatrix features;
  std::vector<std::int32_t> labels;  // -1 for unlabeled
  std::int32_t num_classes = 0;
  std::vector<bool> train_mask;
  std::vector<bool> valid_mask;
  std::vector<bool> test_mask;

  index_t num_nodes() const { return graph.num_nodes(); }

  /// Throws std::invalid_argument if sizes disagree, masks overlap, or a
  /// training node has no valid label.
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

struct SbmParams {
  index_t num_nodes = 300;
  std::int32_t num_classes = 3;
  double p_in = 0.1;
  double p_out = 0.01;
  index_t feature_dim = 8;
  double feature_noise = 1.0;
  std::uint64_t seed = 0;
};

/// Block i holds nodes [i*N/C, (i+1)*N/C). Features are the scaled one-hot
/// class indicator plus N(0, feature_noise^2) noise. Nodes are split 60/20/20
/// after a seeded shuffle.
Dataset synth_sbm(const SbmParams& params);

std::vector<index_t> mask_to_ids(const std::vector<bool>& mask);

// ---------------------------------------------------------------------------
// On-disk formats.
//
// Matrix files are little-endian f32, row-major, with a sidecar `<file>.json`
// holding {"rows":N,"cols":d,"dtype":"f32"}. Mask files list node ids one per
// line. A packaged dataset directory holds graph.csr, features.f32,
// labels.f32, {train,valid,test}.txt and manifest.json.

void write_f32_matrix(const std::filesystem::path& path, index_t rows, index_t cols,
                      const std::vector<float>& values);
FeatureMatrix read_f32_matrix(const std::filesystem::path& path);

void write_mask(const std::filesystem::path& path, const std::vector<bool>& mask);
std::vector<bool> read_mask(const std::filesystem::path& path, index_t num_nodes);

/// Binary CSR dump: magic "AGDNCSR1", u64 N, u64 M, u64 offsets[N+1], u64 cols[M].
void write_csr(const std::filesystem::path& path, const Graph& g);
Graph read_csr(const std::filesystem::path& path);

/// 64-bit FNV-1a over bytes.
std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string to_hex(std::uint64_t value);

void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

/// Loads and checks the manifest digest; a mismatch raises ParseError.
Dataset load_dataset(const std::filesystem::path& dir);

/// Digest recorded in manifest.json.
std::string dataset_digest(const std::filesystem::path& dir);

/// Assembles a Dataset from raw inputs: an edge list, a feature matrix file, a
/// label matrix file (N x 1, f32, -1 for unlabeled), and a directory holding
/// train.txt / valid.txt / test.txt.
Dataset ingest_dataset(const std::filesystem::path& edge_path,
                       const std::filesystem::path& feature_path,
                       const std::filesystem::path& label_path,
                       const std::filesystem::path& mask_dir);

}  // namespace agdn
