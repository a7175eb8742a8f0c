#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "fishergen/data.hpp"
#include "fishergen/model.hpp"

namespace fishergen {

/// Every knob of a run. Defaults follow the fully connected Fashion-MNIST
/// setup (batch 64, Adam at 1e-4, three hidden layers of 448).
struct RunConfig {
  Variant variant = Variant::FisherNet;
  std::size_t latent_dim = 2;
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  double learning_rate = 1e-4;
  std::uint64_t seed = 1;
  double cg_tol = 1e-6;
  /// 0 selects 5 · latent_dim.
  std::size_t cg_max_iter = 0;
  std::size_t hidden_width = 448;
  std::size_t hidden_layers = 3;

  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;

  bool synthetic = false;
  SyntheticSpec synthetic_spec;
  std::size_t synthetic_test_count = 500;

  std::string output_dir = ".";

  std::size_t resolved_cg_max_iter() const { return cg_max_iter ? cg_max_iter : 5 * latent_dim; }
  ArchitectureOptions architecture() const { return {hidden_width, hidden_layers}; }

  /// Throws ConfigError on non-positive sizes or rates, or on missing data
  /// sources.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Assign one `key = value` setting. Keys use underscores; dashes are
/// accepted as a synonym. Throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Lines of `key = value`; `#` starts a comment; blank lines are ignored.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Canonical text form. Doubles use 17 significant digits so parsing the
/// result reproduces the config exactly. With `include_output`, output_dir
/// is written too.
std::string serialize_config(const RunConfig& config, bool include_output = true);

/// Keys understood by apply_setting.
const std::map<std::string, std::string>& config_key_help();

struct DataBundle {
  Dataset train;
  Dataset test;
};

/// Synthetic: train uses sample stream 0, test stream 1 of the same map.
/// Otherwise the four IDX paths are read.
DataBundle load_data(const RunConfig& config);

}  // namespace fishergen
