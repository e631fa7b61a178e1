#pragma once

#include <filesystem>
#include <string>

#include "agdn/model.hpp"

namespace agdn {

// Checkpoint layout:
//   line 1: "AGDN-CHECKPOINT 1 <config digest, 16 hex> <config JSON>\n"
//   then one record per tensor until EOF:
//     u32 name length, name bytes, u64 rows, u64 cols, rows*cols f32 (LE)
// Batch-norm running statistics are stored as normL.running_mean/var (1 x d).

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  std::string config_digest;
};

std::string config_digest(const ModelConfig& cfg);

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg,
                     const ModelParams& params);

/// Throws ParseError on a malformed file, a digest mismatch, or tensors that
/// do not match the stored configuration.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace agdn
