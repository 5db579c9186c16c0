#pragma once

#include "proxpool/network.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace proxpool {

inline constexpr int kCheckpointVersion = 1;

/// Provenance stored alongside the weights so `eval` can rebuild the split.
struct CheckpointMeta {
  std::string dataset;
  std::uint64_t split_seed = 0;
  std::size_t selected_epoch = 0;
};

struct Checkpoint {
  ProxPoolNet net;
  CheckpointMeta meta;
};

/// JSON document: {"format", "version", "model", "meta", "adam_step",
/// "params": {name: {"rows", "cols", "data" (row-major)}}}.  Doubles are
/// written with round-trip precision.
std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace proxpool
