#include "fishergen/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fishergen/errors.hpp"

namespace fishergen {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& value) {
  Int out{};
  const auto* end = value.data() + value.size();
  const auto r = std::from_chars(value.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) {
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + value + "'");
}

}  // namespace

void RunConfig::validate() const {
  auto positive = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("config: ") + what + " must be positive");
  };
  positive(latent_dim > 0, "latent_dim");
  positive(epochs > 0, "epochs");
  positive(batch_size > 0, "batch_size");
  positive(learning_rate > 0.0, "learning_rate");
  positive(cg_tol > 0.0, "cg_tol");
  positive(hidden_width > 0, "hidden_width");
  if (synthetic) {
    synthetic_spec.validate();
    positive(synthetic_spec.sample_count > 0, "synthetic_train_count");
    positive(synthetic_test_count > 0, "synthetic_test_count");
  } else if (train_images.empty() || train_labels.empty()) {
    throw ConfigError("config: set train_images/train_labels or synthetic = true");
  }
}

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  for (char& ch : key) {
    if (ch == '-') ch = '_';
  }
  const std::string value = trim(raw_value);
  auto& s = c.synthetic_spec;
  if (key == "variant" || key == "model_variant") c.variant = parse_variant(value);
  else if (key == "latent_dim") c.latent_dim = parse_int<std::size_t>(key, value);
  else if (key == "epochs") c.epochs = parse_int<std::size_t>(key, value);
  else if (key == "batch_size") c.batch_size = parse_int<std::size_t>(key, value);
  else if (key == "learning_rate") c.learning_rate = parse_double(key, value);
  else if (key == "seed") c.seed = parse_int<std::uint64_t>(key, value);
  else if (key == "cg_tol") c.cg_tol = parse_double(key, value);
  else if (key == "cg_max_iter") c.cg_max_iter = parse_int<std::size_t>(key, value);
  else if (key == "hidden_width") c.hidden_width = parse_int<std::size_t>(key, value);
  else if (key == "hidden_layers") c.hidden_layers = parse_int<std::size_t>(key, value);
  else if (key == "train_images") c.train_images = value;
  else if (key == "train_labels") c.train_labels = value;
  else if (key == "test_images") c.test_images = value;
  else if (key == "test_labels") c.test_labels = value;
  else if (key == "synthetic") c.synthetic = parse_bool(key, value);
  else if (key == "synthetic_latent_dim") s.latent_dim_true = parse_int<std::size_t>(key, value);
  else if (key == "synthetic_data_dim") s.data_dim = parse_int<std::size_t>(key, value);
  else if (key == "synthetic_noise_sigma") s.noise_sigma = parse_double(key, value);
  else if (key == "synthetic_train_count") s.sample_count = parse_int<std::size_t>(key, value);
  else if (key == "synthetic_test_count") c.synthetic_test_count = parse_int<std::size_t>(key, value);
  else if (key == "synthetic_seed") s.seed = parse_int<std::uint64_t>(key, value);
  else if (key == "synthetic_separation") s.cluster_separation = parse_double(key, value);
  else if (key == "synthetic_cluster_std") s.cluster_std = parse_double(key, value);
  else if (key == "output_dir") c.output_dir = value;
  else throw ConfigError("config: unknown key '" + key + "'");
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string serialize_config(const RunConfig& c, bool include_output) {
  std::ostringstream out;
  const auto& s = c.synthetic_spec;
  out << "variant = " << to_string(c.variant) << "\n"
      << "latent_dim = " << c.latent_dim << "\n"
      << "epochs = " << c.epochs << "\n"
      << "batch_size = " << c.batch_size << "\n"
      << "learning_rate = " << format_double(c.learning_rate) << "\n"
      << "seed = " << c.seed << "\n"
      << "cg_tol = " << format_double(c.cg_tol) << "\n"
      << "cg_max_iter = " << c.cg_max_iter << "\n"
      << "hidden_width = " << c.hidden_width << "\n"
      << "hidden_layers = " << c.hidden_layers << "\n"
      << "train_images = " << c.train_images << "\n"
      << "train_labels = " << c.train_labels << "\n"
      << "test_images = " << c.test_images << "\n"
      << "test_labels = " << c.test_labels << "\n"
      << "synthetic = " << (c.synthetic ? "true" : "false") << "\n"
      << "synthetic_latent_dim = " << s.latent_dim_true << "\n"
      << "synthetic_data_dim = " << s.data_dim << "\n"
      << "synthetic_noise_sigma = " << format_double(s.noise_sigma) << "\n"
      << "synthetic_train_count = " << s.sample_count << "\n"
      << "synthetic_test_count = " << c.synthetic_test_count << "\n"
      << "synthetic_seed = " << s.seed << "\n"
      << "synthetic_separation = " << format_double(s.cluster_separation) << "\n"
      << "synthetic_cluster_std = " << format_double(s.cluster_std) << "\n";
  if (include_output) out << "output_dir = " << c.output_dir << "\n";
  return out.str();
}

const std::map<std::string, std::string>& config_key_help() {
  static const std::map<std::string, std::string> help = {
      {"variant", "fisher or vae"},
      {"latent_dim", "latent space dimension"},
      {"epochs", "training epochs"},
      {"batch_size", "minibatch size"},
      {"learning_rate", "Adam step size"},
      {"seed", "run seed (weights, sampling, batch order)"},
      {"cg_tol", "CG relative residual tolerance"},
      {"cg_max_iter", "CG iteration cap (0 = 5 x latent_dim)"},
      {"hidden_width", "neurons per hidden layer"},
      {"hidden_layers", "hidden layers in encoder and decoder"},
      {"train_images", "IDX training images (optionally gzipped)"},
      {"train_labels", "IDX training labels"},
      {"test_images", "IDX test images"},
      {"test_labels", "IDX test labels"},
      {"synthetic", "use the synthetic generator instead of IDX files"},
      {"synthetic_latent_dim", "true latent dimension of the synthetic map"},
      {"synthetic_data_dim", "synthetic data dimension"},
      {"synthetic_noise_sigma", "synthetic noise standard deviation"},
      {"synthetic_train_count", "synthetic training samples"},
      {"synthetic_test_count", "synthetic test samples"},
      {"synthetic_seed", "synthetic generator seed"},
      {"synthetic_separation", "blob separation (0 = standard normal latents)"},
      {"synthetic_cluster_std", "blob standard deviation"},
      {"output_dir", "directory for checkpoints, metrics and exports"},
  };
  return help;
}

DataBundle load_data(const RunConfig& config) {
  DataBundle bundle;
  if (config.synthetic) {
    SyntheticSpec train = config.synthetic_spec;
    train.sample_stream = 0;
    SyntheticSpec test = train;
    test.sample_stream = 1;
    test.sample_count = config.synthetic_test_count;
    bundle.train = make_synthetic(train).dataset;
    bundle.test = make_synthetic(test).dataset;
    return bundle;
  }
  if (config.train_images.empty() || config.train_labels.empty()) {
    throw ConfigError("no training data configured");
  }
  bundle.train = load_idx(config.train_images, config.train_labels);
  if (!config.test_images.empty() && !config.test_labels.empty()) {
    bundle.test = load_idx(config.test_images, config.test_labels);
  } else {
    bundle.test = bundle.train;
  }
  return bundle;
}

}  // namespace fishergen
