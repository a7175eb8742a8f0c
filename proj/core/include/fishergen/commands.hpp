#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fishergen/checkpoint.hpp"
#include "fishergen/clustering.hpp"
#include "fishergen/config.hpp"
#include "fishergen/data.hpp"
#include "fishergen/eval.hpp"
#include "fishergen/train.hpp"

namespace fishergen {

inline constexpr const char* kCheckpointFile = "checkpoint.fgn";
inline constexpr const char* kMetricsFile = "metrics.jsonl";

struct TrainOptions {
  /// Continue from output_dir/checkpoint.fgn when it exists.
  bool resume = false;
  /// Stop after this many epochs in this call (0 = run to config.epochs).
  std::size_t max_new_epochs = 0;
  /// Called after every epoch, once its checkpoint is on disk.
  std::function<void(const EpochMetrics&, const TrainingState&)> on_epoch;
  TrainHooks hooks;
};

struct TrainResult {
  std::vector<EpochMetrics> history;
  std::filesystem::path checkpoint_path;
  std::filesystem::path metrics_path;
  std::uint64_t completed_epochs = 0;
};

/// Train on `data.train`, appending one JSON line per epoch to
/// output_dir/metrics.jsonl and rewriting output_dir/checkpoint.fgn after
/// every epoch.
TrainResult cmd_train(const RunConfig& config, const DataBundle& data,
                      const TrainOptions& options = {});
TrainResult cmd_train(const RunConfig& config, const TrainOptions& options = {});

struct EvalResult {
  double test_mse = 0.0;
  std::vector<double> per_datum_mse;
  /// Sampled-path objective per datum and its terms.
  LossBreakdown loss;
  /// Absent when the set is too small for the proxy.
  std::optional<double> frechet_proxy;
  DenseArray reconstructions;
};

struct EvalOptions {
  std::optional<std::filesystem::path> reconstructions_csv;
  std::size_t feat_dim = 16;
};

/// MSE through the means (decode(mu)), loss on the sampled path with noise
/// from a stream derived from the run seed, and the Fréchet proxy between the
/// data and its reconstructions.
EvalResult cmd_eval(const Checkpoint& checkpoint, const Dataset& data,
                    const EvalOptions& options = {});
std::string eval_json(const EvalResult& result);

struct LatentOptions {
  bool with_metric = true;
  bool with_ellipses = false;
  std::optional<std::filesystem::path> latent_csv;
  std::optional<std::filesystem::path> ellipse_csv;
};

/// One record per datum. Ellipses need latent_dim == 2 (ShapeError otherwise).
std::vector<LatentRecord> cmd_latent(const Checkpoint& checkpoint, const Dataset& data,
                                     const LatentOptions& options = {});

enum class SampleMode { Gaussian, Kde };
SampleMode parse_sample_mode(const std::string& name);

struct SampleOptions {
  std::size_t count = 0;
  SampleMode mode = SampleMode::Gaussian;
  /// Support points for kde mode.
  std::optional<std::filesystem::path> latent_csv;
  /// Reference images for the proxy; none means no proxy.
  const Dataset* reference = nullptr;
  /// PGM files go to image_dir/sample_<i>.pgm when set.
  std::optional<std::filesystem::path> image_dir;
  std::size_t image_rows = 0;
  std::size_t image_cols = 0;
  std::size_t feat_dim = 16;
  /// Stream id mixed with the run seed for the latent draws.
  std::uint64_t stream = 0;
};

struct SampleResult {
  DenseArray latents;
  DenseArray images;
  std::optional<double> frechet_proxy;
};

/// Decode latent draws from N(0, I) or from a KDE over the latent CSV means.
/// Images are clamped to [0, 1].
SampleResult cmd_sample(const Checkpoint& checkpoint, const SampleOptions& options);

struct ClusterResult {
  ClusterMatrix matrix;
  KMeansResult kmeans;
  std::size_t classes = 0;
};

/// k-means (10 restarts) on the latent means, then the class-by-cluster
/// matrix. Throws ConfigError when K is zero or exceeds the row count.
ClusterResult cmd_cluster(const std::vector<LatentRecord>& records, std::size_t clusters,
                          std::uint64_t seed);
std::string cluster_json(const ClusterResult& result);

/// Append one line to a file, creating it if needed.
void append_line(const std::filesystem::path& path, const std::string& line);

}  // namespace fishergen
