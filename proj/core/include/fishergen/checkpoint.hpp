#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fishergen/adam.hpp"
#include "fishergen/config.hpp"
#include "fishergen/model.hpp"
#include "fishergen/rng.hpp"

namespace fishergen {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Everything needed to resume a run bit-exactly.
///
/// Binary layout, all integers and doubles little-endian:
///   "FGN1"                      4 bytes
///   u32 version
///   u32 n, n bytes              config text (serialize_config, no output_dir)
///   u8  variant                 0 = fisher, 1 = vae
///   encoder spec, decoder spec  u32 layers, u32 widths[layers + 1], u8 activations[layers]
///   u64 n, f64[n]               parameters in ParamStore flat order (xi_n last)
///   u64 adam step, u64 n, f64 m[n], f64 v[n]
///   u64 completed epochs
///   u64 rng key, u64 rng counter
struct Checkpoint {
  RunConfig config;
  GenerativeModel model;
  AdamState adam;
  std::uint64_t epoch = 0;
  CounterRng::State rng;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint);
/// Throws FormatError on bad magic, unknown version, truncation or
/// inconsistent shapes.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

/// Writes to a temporary sibling and renames over `path`.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fishergen
