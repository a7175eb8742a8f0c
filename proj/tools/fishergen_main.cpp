#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "fishergen/commands.hpp"
#include "fishergen/errors.hpp"
#include "fishergen/formats.hpp"

namespace fs = std::filesystem;
using namespace fishergen;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

std::string flag_name(const std::string& key) {
  std::string name = key;
  for (char& c : name) {
    if (c == '_') c = '-';
  }
  return "--" + name;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "key = value run configuration");
  for (const auto& [key, help] : config_key_help()) {
    const std::string k = key;
    cmd->add_option_function<std::string>(
        flag_name(key), [&args, k](const std::string& v) { args.overrides[k] = v; }, help);
  }
}

RunConfig apply_overrides(RunConfig config, const CommonArgs& args) {
  for (const auto& [key, value] : args.overrides) apply_setting(config, key, value);
  return config;
}

RunConfig base_config(const CommonArgs& args) {
  RunConfig config = args.config_path.empty() ? RunConfig{} : load_config(args.config_path);
  return apply_overrides(config, args);
}

struct Loaded {
  RunConfig config;
  Checkpoint checkpoint;
};

/// Without --config, the run settings stored in the checkpoint are the base.
Loaded load_for_analysis(const CommonArgs& args, const std::string& checkpoint_flag) {
  const RunConfig flags_only = base_config(args);
  fs::path path = checkpoint_flag.empty() ? fs::path(flags_only.output_dir) / kCheckpointFile
                                          : fs::path(checkpoint_flag);
  Checkpoint ckpt = load_checkpoint(path);
  RunConfig config = flags_only;
  if (args.config_path.empty()) {
    config = ckpt.config;
    config.output_dir = flags_only.output_dir;
    config = apply_overrides(config, args);
  }
  return {config, std::move(ckpt)};
}

void ensure_dir(const fs::path& dir) { fs::create_directories(dir); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fishergen: FisherNet and baseline VAE training and analysis"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, latent_args, sample_args, cluster_args;

  auto* train = app.add_subcommand("train", "train a model, writing metrics.jsonl and checkpoint.fgn");
  add_common(train, train_args);
  bool resume = false;
  train->add_flag("--resume", resume, "continue from output_dir/checkpoint.fgn");

  auto* eval = app.add_subcommand("eval", "test MSE, sampled loss and Frechet proxy of reconstructions");
  add_common(eval, eval_args);
  std::string eval_ckpt, recon_csv;
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint (default output_dir/checkpoint.fgn)");
  eval->add_option("--reconstructions", recon_csv, "write mean reconstructions as CSV");

  auto* latent = app.add_subcommand("latent", "export latent means and metric eigenpairs");
  add_common(latent, latent_args);
  std::string latent_ckpt, latent_out, ellipse_out;
  bool ellipses = false, no_metric = false;
  latent->add_option("--checkpoint", latent_ckpt, "checkpoint (default output_dir/checkpoint.fgn)");
  latent->add_option("--out", latent_out, "latent CSV (default output_dir/latent.csv)");
  latent->add_flag("--ellipses", ellipses, "also write 1- and 2-sigma ellipses (latent_dim 2)");
  latent->add_option("--ellipse-out", ellipse_out, "ellipse CSV (default output_dir/ellipses.csv)");
  latent->add_flag("--no-metric", no_metric, "skip the eigen-analysis columns");

  auto* sample = app.add_subcommand("sample", "decode latent draws to PGM images");
  add_common(sample, sample_args);
  std::string sample_ckpt, sample_latent, sample_mode = "gaussian", sample_dir;
  std::size_t sample_count = 0;
  bool no_images = false;
  sample->add_option("--checkpoint", sample_ckpt, "checkpoint (default output_dir/checkpoint.fgn)");
  sample->add_option("-n,--count", sample_count, "number of samples")->required();
  sample->add_option("--mode", sample_mode, "gaussian or kde")
      ->check(CLI::IsMember({"gaussian", "kde"}));
  sample->add_option("--latent-csv", sample_latent, "latent CSV with KDE support points");
  sample->add_option("--image-dir", sample_dir, "PGM directory (default output_dir/samples)");
  sample->add_flag("--no-images", no_images, "skip writing PGM files");

  auto* cluster = app.add_subcommand("cluster", "k-means on latent means and the cluster trace");
  add_common(cluster, cluster_args);
  std::string cluster_latent, cluster_out;
  std::size_t cluster_k = 0;
  cluster->add_option("--latent-csv", cluster_latent, "latent CSV to cluster")->required();
  cluster->add_option("-k,--clusters", cluster_k, "number of clusters")->required();
  cluster->add_option("--out", cluster_out, "cluster matrix CSV (default output_dir/clusters.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (train->parsed()) {
      const RunConfig config = base_config(train_args);
      TrainOptions options;
      options.resume = resume;
      options.on_epoch = [](const EpochMetrics& m, const TrainingState&) {
        std::cout << to_json_line(m) << std::endl;
      };
      const TrainResult r = cmd_train(config, options);
      std::cerr << "checkpoint: " << r.checkpoint_path.string() << "\n";
    } else if (eval->parsed()) {
      const Loaded l = load_for_analysis(eval_args, eval_ckpt);
      const DataBundle data = load_data(l.config);
      EvalOptions options;
      if (!recon_csv.empty()) options.reconstructions_csv = recon_csv;
      const EvalResult r = cmd_eval(l.checkpoint, data.test, options);
      std::cout << eval_json(r) << std::endl;
    } else if (latent->parsed()) {
      const Loaded l = load_for_analysis(latent_args, latent_ckpt);
      const DataBundle data = load_data(l.config);
      const fs::path dir = l.config.output_dir;
      ensure_dir(dir);
      LatentOptions options;
      options.with_metric = !no_metric;
      options.with_ellipses = ellipses;
      options.latent_csv = latent_out.empty() ? dir / "latent.csv" : fs::path(latent_out);
      options.ellipse_csv = ellipse_out.empty() ? dir / "ellipses.csv" : fs::path(ellipse_out);
      const auto records = cmd_latent(l.checkpoint, data.test, options);
      std::cerr << records.size() << " latent records written to "
                << options.latent_csv->string() << "\n";
    } else if (sample->parsed()) {
      const Loaded l = load_for_analysis(sample_args, sample_ckpt);
      const DataBundle data = load_data(l.config);
      SampleOptions options;
      options.count = sample_count;
      options.mode = parse_sample_mode(sample_mode);
      if (!sample_latent.empty()) options.latent_csv = sample_latent;
      options.reference = &data.test;
      if (!no_images) {
        options.image_dir =
            sample_dir.empty() ? fs::path(l.config.output_dir) / "samples" : fs::path(sample_dir);
      }
      options.image_rows = data.test.image_rows;
      options.image_cols = data.test.image_cols;
      const SampleResult r = cmd_sample(l.checkpoint, options);
      nlohmann::ordered_json j;
      j["mode"] = sample_mode;
      j["count"] = sample_count;
      j["frechet_proxy"] = r.frechet_proxy ? nlohmann::ordered_json(*r.frechet_proxy)
                                           : nlohmann::ordered_json(nullptr);
      std::cout << j.dump() << std::endl;
    } else if (cluster->parsed()) {
      const RunConfig config = base_config(cluster_args);
      const fs::path dir = config.output_dir;
      ensure_dir(dir);
      const auto records = read_latent_csv(cluster_latent);
      const ClusterResult r = cmd_cluster(records, cluster_k, config.seed);
      write_cluster_csv(cluster_out.empty() ? dir / "clusters.csv" : fs::path(cluster_out), r.matrix);
      const std::string line = cluster_json(r);
      append_line(dir / kMetricsFile, line);
      std::cout << line << std::endl;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical divergence: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
