#include "fishergen/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "fishergen/errors.hpp"
#include "fishergen/formats.hpp"
#include "fishergen/frechet.hpp"
#include "fishergen/kde.hpp"
#include "fishergen/loss.hpp"

namespace fs = std::filesystem;

namespace fishergen {

namespace {

constexpr std::uint64_t kEvalStream = 0x4556414C;    // "EVAL"
constexpr std::uint64_t kDrawStream = 0x44524157;    // "DRAW"

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void check_dim(const GenerativeModel& model, const Dataset& data, const char* what) {
  if (data.dim() != model.data_dim()) {
    throw ShapeError(std::string(what) + ": data dimension " + std::to_string(data.dim()) +
                     " differs from model data dimension " + std::to_string(model.data_dim()));
  }
}

std::optional<double> maybe_proxy(const DenseArray& real, const DenseArray& generated,
                                  std::size_t feat_dim) {
  const std::size_t fd = std::min(feat_dim, real.cols());
  if (real.rows() < fd + 1 || generated.rows() < fd + 1 || real.empty() || generated.empty()) {
    return std::nullopt;
  }
  return frechet_proxy(real, generated, feat_dim);
}

DenseArray rows_of(const DenseArray& a, std::size_t begin, std::size_t end) {
  const std::size_t c = a.cols();
  std::vector<double> v(a.values().begin() + static_cast<std::ptrdiff_t>(begin * c),
                        a.values().begin() + static_cast<std::ptrdiff_t>(end * c));
  return DenseArray({end - begin, c}, std::move(v));
}

DenseArray normals(CounterRng& rng, std::size_t rows, std::size_t cols) {
  DenseArray out({rows, cols});
  for (double& x : out.values()) x = rng.normal();
  return out;
}

}  // namespace

void append_line(const fs::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw FormatError("cannot append to '" + path.string() + "'");
  out << line << '\n';
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

TrainResult cmd_train(const RunConfig& config, const DataBundle& data,
                      const TrainOptions& options) {
  config.validate();
  const fs::path dir = config.output_dir;
  ensure_dir(dir);
  TrainResult result;
  result.checkpoint_path = dir / kCheckpointFile;
  result.metrics_path = dir / kMetricsFile;

  const bool resuming = options.resume && fs::exists(result.checkpoint_path);
  TrainingState state = resuming ? state_from_checkpoint(load_checkpoint(result.checkpoint_path))
                                 : initialize_training(config, data.train.dim());
  if (resuming && state.model.variant() != config.variant) {
    throw ConfigError("checkpoint variant " + to_string(state.model.variant()) +
                      " differs from configured variant " + to_string(config.variant));
  }
  check_dim(state.model, data.train, "train");
  if (!resuming) {
    std::ofstream truncate(result.metrics_path, std::ios::trunc);
    if (!truncate) throw FormatError("cannot write '" + result.metrics_path.string() + "'");
  }

  std::size_t done = 0;
  while (state.epoch < config.epochs &&
         (options.max_new_epochs == 0 || done < options.max_new_epochs)) {
    EpochMetrics m = train_epoch(state, data.train, config, options.hooks);
    if (!std::isfinite(m.loss_total)) {
      throw NumericalError("non-finite loss at epoch " + std::to_string(m.epoch));
    }
    save_checkpoint(result.checkpoint_path, to_checkpoint(config, state));
    append_line(result.metrics_path, to_json_line(m));
    result.history.push_back(m);
    if (options.on_epoch) options.on_epoch(m, state);
    ++done;
  }
  result.completed_epochs = state.epoch;
  return result;
}

TrainResult cmd_train(const RunConfig& config, const TrainOptions& options) {
  config.validate();
  return cmd_train(config, load_data(config), options);
}

EvalResult cmd_eval(const Checkpoint& checkpoint, const Dataset& data, const EvalOptions& options) {
  const GenerativeModel& model = checkpoint.model;
  check_dim(model, data, "eval");
  const RunConfig& config = checkpoint.config;
  EvalResult result;
  result.reconstructions = reconstruct_means(model, data.images);
  const MseResult m = mse(data.images, result.reconstructions);
  result.test_mse = m.mean;
  result.per_datum_mse = m.per_datum;

  CounterRng rng = CounterRng::derive(config.seed, kEvalStream);
  SamplingOptions sampling;
  sampling.cg = CgSettings{config.cg_tol, config.resolved_cg_max_iter()};
  const std::size_t p = data.size();
  const std::size_t bs = std::max<std::size_t>(1, config.batch_size);
  for (std::size_t begin = 0; begin < p; begin += bs) {
    const std::size_t end = std::min(p, begin + bs);
    const DenseArray batch = rows_of(data.images, begin, end);
    const Encoding enc = encode(model, batch);
    LossBreakdown part;
    if (model.variant() == Variant::FisherNet) {
      DenseArray z = draw_fisher_offsets(model, enc.mu, rng, sampling);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] += enc.mu[i];
      part = fisher_kl(model, batch, z, p);
    } else {
      const DenseArray eps = normals(rng, end - begin, model.latent_dim());
      part = vae_elbo(model, batch, enc.mu, enc.logvar, eps);
    }
    result.loss.total += part.total;
    result.loss.latent_term += part.latent_term;
    result.loss.recon_term += part.recon_term;
    result.loss.noise_logdet_term += part.noise_logdet_term;
    result.loss.noise_prior_term += part.noise_prior_term;
    result.loss.per_sample_mse.insert(result.loss.per_sample_mse.end(),
                                      part.per_sample_mse.begin(), part.per_sample_mse.end());
  }
  if (p > 0) {
    const double inv = 1.0 / static_cast<double>(p);
    result.loss.total *= inv;
    result.loss.latent_term *= inv;
    result.loss.recon_term *= inv;
    result.loss.noise_logdet_term *= inv;
    result.loss.noise_prior_term *= inv;
  }
  result.frechet_proxy = maybe_proxy(data.images, result.reconstructions, options.feat_dim);
  if (options.reconstructions_csv) write_matrix_csv(*options.reconstructions_csv, result.reconstructions);
  return result;
}

std::string eval_json(const EvalResult& r) {
  nlohmann::ordered_json j;
  j["test_mse"] = r.test_mse;
  j["loss_total"] = r.loss.total;
  j["loss_recon"] = r.loss.recon_term;
  j["loss_latent"] = r.loss.latent_term;
  j["loss_noise_logdet"] = r.loss.noise_logdet_term;
  j["loss_noise_prior"] = r.loss.noise_prior_term;
  j["frechet_proxy"] = r.frechet_proxy ? nlohmann::ordered_json(*r.frechet_proxy)
                                       : nlohmann::ordered_json(nullptr);
  return j.dump();
}

std::vector<LatentRecord> cmd_latent(const Checkpoint& checkpoint, const Dataset& data,
                                     const LatentOptions& options) {
  const GenerativeModel& model = checkpoint.model;
  check_dim(model, data, "latent");
  if (options.with_ellipses && model.latent_dim() != 2) {
    throw ShapeError("uncertainty ellipses need latent_dim 2, model has " +
                     std::to_string(model.latent_dim()));
  }
  const bool eigen = options.with_metric || options.with_ellipses;
  auto records = latent_records(model, data.images, data.labels, eigen);
  if (options.latent_csv) write_latent_csv(*options.latent_csv, records);
  if (options.with_ellipses && options.ellipse_csv) write_ellipse_csv(*options.ellipse_csv, records);
  return records;
}

SampleMode parse_sample_mode(const std::string& name) {
  if (name == "gaussian") return SampleMode::Gaussian;
  if (name == "kde") return SampleMode::Kde;
  throw ConfigError("sample mode must be 'gaussian' or 'kde', got '" + name + "'");
}

SampleResult cmd_sample(const Checkpoint& checkpoint, const SampleOptions& options) {
  const GenerativeModel& model = checkpoint.model;
  const std::size_t L = model.latent_dim();
  CounterRng rng = CounterRng::derive(checkpoint.config.seed, kDrawStream + options.stream);
  SampleResult result;
  if (options.mode == SampleMode::Kde) {
    if (!options.latent_csv) throw ConfigError("kde sampling needs a latent CSV");
    const auto records = read_latent_csv(*options.latent_csv);
    if (records.empty()) throw FormatError("latent CSV has no rows");
    DenseArray support({records.size(), L});
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].mu.size() != L) {
        throw ShapeError("latent CSV has " + std::to_string(records[i].mu.size()) +
                         " dimensions, model has " + std::to_string(L));
      }
      std::copy(records[i].mu.begin(), records[i].mu.end(), support.row(i).begin());
    }
    if (options.count == 0) {
      result.latents = DenseArray({0, L});
    } else {
      result.latents = kde_sample(kde_fit(support), options.count, rng);
    }
  } else {
    result.latents = normals(rng, options.count, L);
  }
  if (options.count == 0) {
    result.images = DenseArray({0, model.data_dim()});
    return result;
  }
  result.images = decode(model, result.latents);
  for (double& x : result.images.values()) x = std::clamp(x, 0.0, 1.0);

  if (options.image_dir) {
    ensure_dir(*options.image_dir);
    std::size_t rows = options.image_rows;
    std::size_t cols = options.image_cols;
    if (rows * cols != model.data_dim()) {
      rows = 1;
      cols = model.data_dim();
    }
    for (std::size_t i = 0; i < options.count; ++i) {
      write_pgm(*options.image_dir / ("sample_" + std::to_string(i) + ".pgm"),
                result.images.row(i), rows, cols);
    }
  }
  if (options.reference) {
    check_dim(model, *options.reference, "sample");
    result.frechet_proxy = maybe_proxy(options.reference->images, result.images, options.feat_dim);
  }
  return result;
}

ClusterResult cmd_cluster(const std::vector<LatentRecord>& records, std::size_t clusters,
                          std::uint64_t seed) {
  if (clusters == 0 || clusters > records.size()) {
    throw ConfigError("cluster count " + std::to_string(clusters) + " must be in [1, " +
                      std::to_string(records.size()) + "]");
  }
  const std::size_t L = records.front().mu.size();
  DenseArray points({records.size(), L});
  std::vector<int> labels;
  labels.reserve(records.size());
  int max_label = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].mu.size() != L) throw ShapeError("latent records have mixed dimensions");
    if (records[i].label < 0) throw FormatError("negative label in latent records");
    std::copy(records[i].mu.begin(), records[i].mu.end(), points.row(i).begin());
    labels.push_back(records[i].label);
    max_label = std::max(max_label, records[i].label);
  }
  ClusterResult result;
  result.classes = static_cast<std::size_t>(max_label) + 1;
  result.kmeans = kmeans_restarts(points, clusters, seed);
  result.matrix = cluster_trace(result.kmeans.assignments, labels, result.classes, clusters);
  return result;
}

std::string cluster_json(const ClusterResult& r) {
  nlohmann::ordered_json j;
  j["cluster_trace"] = r.matrix.trace;
  j["classes"] = r.classes;
  j["clusters"] = r.kmeans.centers.rows();
  j["inertia"] = r.kmeans.inertia;
  return j.dump();
}

}  // namespace fishergen
