#include "fishergen/model.hpp"

#include <cmath>

#include "fishergen/errors.hpp"

namespace fishergen {

std::string to_string(Variant v) { return v == Variant::FisherNet ? "fisher" : "vae"; }

Variant parse_variant(const std::string& name) {
  if (name == "fisher") return Variant::FisherNet;
  if (name == "vae") return Variant::BaselineVAE;
  throw ConfigError("unknown model variant '" + name + "' (expected fisher or vae)");
}

GenerativeModel::GenerativeModel(Variant variant, MlpSpec encoder, MlpSpec decoder,
                                 ParamStore params)
    : variant_(variant), encoder_(std::move(encoder)), decoder_(std::move(decoder)),
      params_(std::move(params)) {
  encoder_.validate();
  decoder_.validate();
  const std::size_t head = variant_ == Variant::FisherNet ? latent_dim() : 2 * latent_dim();
  if (encoder_.output_width() != head) {
    throw ShapeError("GenerativeModel: encoder head width " +
                     std::to_string(encoder_.output_width()) + ", expected " +
                     std::to_string(head));
  }
  if (encoder_.input_width() != data_dim()) {
    throw ShapeError("GenerativeModel: encoder input width differs from decoder output width");
  }
  if (decoder_.activations.back() != Activation::Identity) {
    throw ShapeError("GenerativeModel: decoder output layer must be Identity");
  }
  if (params_.layers.size() != encoder_.layer_count() + decoder_.layer_count()) {
    throw ShapeError("GenerativeModel: parameter layer count does not match specs");
  }
  for (std::size_t l = 0; l < params_.layers.size(); ++l) {
    const MlpSpec& spec = l < encoder_.layer_count() ? encoder_ : decoder_;
    const std::size_t k = l < encoder_.layer_count() ? l : l - encoder_.layer_count();
    const auto& w = params_.layers[l].weight;
    if (w.rank() != 2 || w.shape()[0] != spec.layer_widths[k + 1] ||
        w.shape()[1] != spec.layer_widths[k] ||
        params_.layers[l].bias.size() != spec.layer_widths[k + 1]) {
      throw ShapeError("GenerativeModel: layer " + std::to_string(l) + " has shape " +
                       w.shape_string());
    }
  }
  if (!std::isfinite(params_.xi_n)) throw NumericalError("GenerativeModel: xi_n not finite");
}

LayerSpan GenerativeModel::encoder_layers() const {
  return LayerSpan(params_.layers).first(encoder_.layer_count());
}

LayerSpan GenerativeModel::decoder_layers() const {
  return LayerSpan(params_.layers).subspan(encoder_.layer_count());
}

std::span<LayerParams> GenerativeModel::encoder_slice(ParamStore& store) const {
  return std::span<LayerParams>(store.layers).first(encoder_.layer_count());
}

std::span<LayerParams> GenerativeModel::decoder_slice(ParamStore& store) const {
  return std::span<LayerParams>(store.layers).subspan(encoder_.layer_count());
}

Encoding encode(const GenerativeModel& model, const DenseArray& data) {
  DenseArray head = forward(model.encoder_spec(), model.encoder_layers(), data).output;
  Encoding enc;
  if (model.variant() == Variant::FisherNet) {
    enc.mu = std::move(head);
    return enc;
  }
  const std::size_t latent = model.latent_dim();
  const std::size_t rows = head.rows();
  std::vector<std::size_t> shape =
      head.rank() == 1 ? std::vector<std::size_t>{latent} : std::vector<std::size_t>{rows, latent};
  enc.mu = DenseArray(shape);
  enc.logvar = DenseArray(shape);
  for (std::size_t r = 0; r < rows; ++r) {
    auto src = head.row(r);
    auto mu = enc.mu.row(r);
    auto lv = enc.logvar.row(r);
    for (std::size_t j = 0; j < latent; ++j) {
      mu[j] = src[j];
      lv[j] = src[latent + j];
    }
  }
  return enc;
}

DenseArray decode(const GenerativeModel& model, const DenseArray& latent) {
  return forward(model.decoder_spec(), model.decoder_layers(), latent).output;
}

double noise_covariance_scalar(const GenerativeModel& model) {
  const double sigma2 = std::exp(model.xi_n());
  if (!std::isfinite(sigma2) || sigma2 <= 0.0) {
    throw NumericalError("noise covariance exp(xi_n) out of range: xi_n = " +
                         std::to_string(model.xi_n()));
  }
  return sigma2;
}

GenerativeModel build_architecture(std::size_t latent_dim, std::size_t data_dim, Variant variant,
                                   const ArchitectureOptions& options) {
  if (latent_dim == 0) throw ShapeError("build_architecture: latent_dim must be >= 1");
  if (data_dim == 0 || options.hidden_width == 0) {
    throw ShapeError("build_architecture: widths must be positive");
  }
  const std::size_t head = variant == Variant::FisherNet ? latent_dim : 2 * latent_dim;
  std::vector<std::size_t> enc{data_dim};
  std::vector<std::size_t> dec{latent_dim};
  for (std::size_t i = 0; i < options.hidden_layers; ++i) {
    enc.push_back(options.hidden_width);
    dec.push_back(options.hidden_width);
  }
  enc.push_back(head);
  dec.push_back(data_dim);
  MlpSpec encoder = MlpSpec::relu_chain(enc);
  MlpSpec decoder = MlpSpec::relu_chain(dec);
  ParamStore params = ParamStore::zeros(encoder);
  params.append(ParamStore::zeros(decoder));
  return GenerativeModel(variant, std::move(encoder), std::move(decoder), std::move(params));
}

GenerativeModel build_paper_architecture(std::size_t latent_dim, std::size_t data_dim,
                                         Variant variant) {
  return build_architecture(latent_dim, data_dim, variant, ArchitectureOptions{448, 3});
}

void initialize_weights(GenerativeModel& model, CounterRng& rng) {
  ParamStore enc = init_params(model.encoder_spec(), rng);
  ParamStore dec = init_params(model.decoder_spec(), rng);
  enc.append(dec);
  enc.xi_n = 0.0;
  model.params() = std::move(enc);
}

}  // namespace fishergen
