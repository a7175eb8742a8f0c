#include "fishergen/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>

#include "fishergen/errors.hpp"
#include "fishergen/rng.hpp"

namespace fishergen {

namespace {

// Stream ids under one seed; keep them distinct.
constexpr std::uint64_t kMapStream = 0x4D4150;          // "MAP"
constexpr std::uint64_t kSampleStreamBase = 0x53414D00;  // "SAM"
constexpr std::uint64_t kBatchStreamBase = 0x42415400;   // "BAT"

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw FormatError("cannot open '" + path.string() + "': no such file");
  }
  // gzread passes uncompressed files through unchanged.
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (file == nullptr) throw FormatError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes;
  std::vector<std::uint8_t> chunk(1 << 16);
  for (;;) {
    const int n = gzread(file, chunk.data(), static_cast<unsigned>(chunk.size()));
    if (n < 0) {
      int err = 0;
      const std::string msg = gzerror(file, &err);
      gzclose(file);
      throw FormatError("read error in '" + path.string() + "': " + msg);
    }
    if (n == 0) break;
    bytes.insert(bytes.end(), chunk.begin(), chunk.begin() + n);
  }
  gzclose(file);
  return bytes;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

}  // namespace

DenseArray Dataset::gather(std::span<const std::size_t> indices) const {
  const std::size_t k = dim();
  DenseArray out({indices.size(), k});
  for (std::size_t r = 0; r < indices.size(); ++r) {
    auto src = images.row(indices[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

void Dataset::validate() const {
  if (images.rank() != 2) throw FormatError("dataset: images must be a [p, k] array");
  if (images.rows() != labels.size()) throw FormatError("dataset: image/label count mismatch");
  for (double x : images.values()) {
    if (!(x >= 0.0 && x <= 1.0)) throw FormatError("dataset: pixel outside [0, 1]");
  }
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= classes) {
      throw FormatError("dataset: label outside [0, classes)");
    }
  }
}

Dataset parse_idx(std::span<const std::uint8_t> image_bytes,
                  std::span<const std::uint8_t> label_bytes) {
  if (image_bytes.size() < 16) throw FormatError("IDX images: truncated header");
  if (read_be32(image_bytes, 0) != kIdxImagesMagic) {
    throw FormatError("IDX images: bad magic (expected 0x00000803)");
  }
  const std::size_t count = read_be32(image_bytes, 4);
  const std::size_t rows = read_be32(image_bytes, 8);
  const std::size_t cols = read_be32(image_bytes, 12);
  const std::size_t k = rows * cols;
  const std::size_t expected = 16 + count * k;
  if (image_bytes.size() < expected) throw FormatError("IDX images: truncated payload");
  if (image_bytes.size() > expected) throw FormatError("IDX images: trailing bytes after payload");

  if (label_bytes.size() < 8) throw FormatError("IDX labels: truncated header");
  if (read_be32(label_bytes, 0) != kIdxLabelsMagic) {
    throw FormatError("IDX labels: bad magic (expected 0x00000801)");
  }
  const std::size_t label_count = read_be32(label_bytes, 4);
  if (label_count != count) {
    throw FormatError("IDX: " + std::to_string(count) + " images but " +
                      std::to_string(label_count) + " labels");
  }
  if (label_bytes.size() < 8 + count) throw FormatError("IDX labels: truncated payload");
  if (label_bytes.size() > 8 + count) throw FormatError("IDX labels: trailing bytes after payload");

  Dataset ds;
  ds.image_rows = rows;
  ds.image_cols = cols;
  ds.images = DenseArray({count, k});
  auto& px = ds.images.values();
  for (std::size_t i = 0; i < count * k; ++i) px[i] = image_bytes[16 + i] / 255.0;
  ds.labels.resize(count);
  int max_label = -1;
  for (std::size_t i = 0; i < count; ++i) {
    ds.labels[i] = label_bytes[8 + i];
    max_label = std::max(max_label, ds.labels[i]);
  }
  ds.classes = static_cast<std::size_t>(max_label + 1);
  return ds;
}

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
  const auto images = read_maybe_gzip(images_path);
  const auto labels = read_maybe_gzip(labels_path);
  return parse_idx(images, labels);
}

std::vector<std::uint8_t> encode_idx_images(const Dataset& dataset) {
  std::size_t rows = dataset.image_rows;
  std::size_t cols = dataset.image_cols;
  if (rows * cols != dataset.dim()) {
    rows = dataset.dim();
    cols = 1;
  }
  std::vector<std::uint8_t> out;
  out.reserve(16 + dataset.images.size());
  write_be32(out, kIdxImagesMagic);
  write_be32(out, static_cast<std::uint32_t>(dataset.size()));
  write_be32(out, static_cast<std::uint32_t>(rows));
  write_be32(out, static_cast<std::uint32_t>(cols));
  for (double x : dataset.images.values()) {
    out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)));
  }
  return out;
}

std::vector<std::uint8_t> encode_idx_labels(const Dataset& dataset) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + dataset.size());
  write_be32(out, kIdxLabelsMagic);
  write_be32(out, static_cast<std::uint32_t>(dataset.size()));
  for (int l : dataset.labels) out.push_back(static_cast<std::uint8_t>(l));
  return out;
}

void write_idx(const Dataset& dataset, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path) {
  write_bytes(images_path, encode_idx_images(dataset));
  write_bytes(labels_path, encode_idx_labels(dataset));
}

void SyntheticSpec::validate() const {
  if (latent_dim_true == 0 || data_dim == 0) {
    throw ConfigError("synthetic: latent and data dimensions must be positive");
  }
  if (!(noise_sigma >= 0.0)) throw ConfigError("synthetic: noise_sigma must be >= 0");
  if (!(cluster_separation >= 0.0) || !(cluster_std >= 0.0)) {
    throw ConfigError("synthetic: cluster parameters must be >= 0");
  }
}

TrueMap TrueMap::from_spec(const SyntheticSpec& spec) {
  spec.validate();
  CounterRng rng = CounterRng::derive(spec.seed, kMapStream);
  const std::size_t k = spec.data_dim;
  const std::size_t L = spec.latent_dim_true;
  TrueMap map;
  map.frequencies = DenseArray({k, L});
  const double scale = 1.0 / std::sqrt(static_cast<double>(L));
  for (double& a : map.frequencies.values()) a = scale * rng.normal();
  map.phases.resize(k);
  for (double& p : map.phases) p = 2.0 * std::numbers::pi * rng.uniform();
  return map;
}

std::vector<double> TrueMap::operator()(std::span<const double> z) const {
  const std::size_t k = frequencies.rows();
  std::vector<double> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    out[j] = 0.5 + 0.35 * std::sin(dot(frequencies.row(j), z) + phases[j]);
  }
  return out;
}

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  const TrueMap map = TrueMap::from_spec(spec);
  CounterRng rng = CounterRng::derive(spec.seed, kSampleStreamBase + spec.sample_stream);
  const std::size_t p = spec.sample_count;
  const std::size_t k = spec.data_dim;
  const std::size_t L = spec.latent_dim_true;
  const std::size_t label_dims = std::min<std::size_t>(L, 4);

  SyntheticData out;
  out.true_latents = DenseArray({p, L});
  Dataset& ds = out.dataset;
  ds.images = DenseArray({p, k});
  ds.labels.resize(p);
  ds.classes = std::size_t{1} << label_dims;
  const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(k))));
  if (side * side == k) {
    ds.image_rows = ds.image_cols = side;
  } else {
    ds.image_rows = 1;
    ds.image_cols = k;
  }

  for (std::size_t i = 0; i < p; ++i) {
    auto z = out.true_latents.row(i);
    for (double& x : z) {
      if (spec.cluster_separation > 0.0) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        x = sign * spec.cluster_separation + spec.cluster_std * rng.normal();
      } else {
        x = rng.normal();
      }
    }
    const std::vector<double> clean = map(z);
    auto d = ds.images.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      const double noise = spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.normal() : 0.0;
      d[j] = std::clamp(clean[j] + noise, 0.0, 1.0);
    }
    int label = 0;
    for (std::size_t a = 0; a < label_dims; ++a) {
      if (z[a] > 0.0) label |= 1 << a;
    }
    ds.labels[i] = label;
  }
  return out;
}

std::vector<std::vector<std::size_t>> batch_iter(std::size_t dataset_size,
                                                 std::size_t batch_size, std::uint64_t seed,
                                                 std::uint64_t epoch) {
  if (batch_size == 0) throw ConfigError("batch_iter: batch_size must be >= 1");
  std::vector<std::size_t> order(dataset_size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng = CounterRng::derive(seed, kBatchStreamBase + epoch);
  for (std::size_t i = dataset_size; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < dataset_size; start += batch_size) {
    const std::size_t end = std::min(dataset_size, start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

}  // namespace fishergen
