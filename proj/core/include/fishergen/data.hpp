#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fishergen/array.hpp"

namespace fishergen {

/// p images of k pixels in [0, 1] with integer labels in [0, classes).
struct Dataset {
  DenseArray images;  // [p, k]
  std::vector<int> labels;
  std::size_t classes = 0;
  /// Image geometry for export; rows · cols == k.
  std::size_t image_rows = 0;
  std::size_t image_cols = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return images.cols(); }

  /// Rows `indices` stacked into a [n, k] array.
  DenseArray gather(std::span<const std::size_t> indices) const;
  /// Throws FormatError when the invariants do not hold.
  void validate() const;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Parse raw (already decompressed) IDX images + labels. Pixels are scaled by
/// 1/255. Throws FormatError on wrong magic, truncation, trailing bytes or
/// count mismatch.
Dataset parse_idx(std::span<const std::uint8_t> image_bytes,
                  std::span<const std::uint8_t> label_bytes);

/// Read IDX files; gzip-compressed files are decompressed transparently.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

/// Inverse of parse_idx; pixels are rounded to the nearest of 0..255.
std::vector<std::uint8_t> encode_idx_images(const Dataset& dataset);
std::vector<std::uint8_t> encode_idx_labels(const Dataset& dataset);
void write_idx(const Dataset& dataset, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path);

/// Known-truth data d = f_true(z) + n with z standard normal (or, with a
/// positive cluster_separation, a mixture of 2^L sign-pattern blobs).
///
/// f_true_j(z) = 0.5 + 0.35·sin(a_j·z + phase_j), with a_j ~ N(0, I/L) and
/// phase_j ~ U[0, 2π) drawn from `seed` alone, so every sample_stream of the
/// same seed shares one map. Pixels are clipped to [0, 1]; labels encode the
/// sign pattern of the first min(L, 4) latent coordinates.
struct SyntheticSpec {
  std::size_t latent_dim_true = 2;
  std::size_t data_dim = 16;
  double noise_sigma = 0.05;
  std::size_t sample_count = 1000;
  std::uint64_t seed = 1;
  /// Distinct streams give independent samples from the same map (e.g. 0 for
  /// train, 1 for test).
  std::uint64_t sample_stream = 0;
  /// Blob centers at ±separation per axis; 0 disables the mixture.
  double cluster_separation = 0.0;
  double cluster_std = 0.3;

  void validate() const;

  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

/// Frequencies [k, L] and phases [k] of f_true.
struct TrueMap {
  DenseArray frequencies;
  std::vector<double> phases;

  static TrueMap from_spec(const SyntheticSpec& spec);
  /// Noise-free image of one latent vector.
  std::vector<double> operator()(std::span<const double> z) const;
};

struct SyntheticData {
  Dataset dataset;
  DenseArray true_latents;  // [p, L]
};

SyntheticData make_synthetic(const SyntheticSpec& spec);

/// Shuffled, partitioned indices for one epoch. The permutation depends only
/// on (seed, epoch); the final batch may be short.
std::vector<std::vector<std::size_t>> batch_iter(std::size_t dataset_size,
                                                 std::size_t batch_size, std::uint64_t seed,
                                                 std::uint64_t epoch);

}  // namespace fishergen
