#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "fishergen/array.hpp"
#include "fishergen/mlp.hpp"
#include "fishergen/rng.hpp"

namespace fishergen {

enum class Variant : std::uint8_t { FisherNet = 0, BaselineVAE = 1 };

std::string to_string(Variant v);
/// Accepts "fisher" / "vae".
Variant parse_variant(const std::string& name);

/// Encoder g_phi, decoder f_theta and the learnable noise parameter xi_n.
///
/// All parameters live in one ParamStore: encoder layers first, then decoder
/// layers, then xi_n. That store's flat order is the checkpoint order.
class GenerativeModel {
 public:
  GenerativeModel(Variant variant, MlpSpec encoder, MlpSpec decoder, ParamStore params);

  Variant variant() const { return variant_; }
  std::size_t latent_dim() const { return decoder_.input_width(); }
  std::size_t data_dim() const { return decoder_.output_width(); }

  const MlpSpec& encoder_spec() const { return encoder_; }
  const MlpSpec& decoder_spec() const { return decoder_; }

  LayerSpan encoder_layers() const;
  LayerSpan decoder_layers() const;

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  double xi_n() const { return params_.xi_n; }
  void set_xi_n(double xi) { params_.xi_n = xi; }

  /// Gradient stores share the parameter layout; these split one.
  std::span<LayerParams> encoder_slice(ParamStore& store) const;
  std::span<LayerParams> decoder_slice(ParamStore& store) const;

 private:
  Variant variant_;
  MlpSpec encoder_;
  MlpSpec decoder_;
  ParamStore params_;
};

struct Encoding {
  DenseArray mu;
  DenseArray logvar;  // empty for FisherNet
};

/// Latent mean (and, for the baseline, log-variance) of one row or a batch.
Encoding encode(const GenerativeModel& model, const DenseArray& data);
DenseArray decode(const GenerativeModel& model, const DenseArray& latent);

/// sigma² = exp(xi_n). The noise covariance is sigma²·Identity.
/// Throws NumericalError when exp overflows (xi_n beyond ~709).
double noise_covariance_scalar(const GenerativeModel& model);

struct ArchitectureOptions {
  std::size_t hidden_width = 448;
  std::size_t hidden_layers = 3;
};

/// `hidden_layers` ReLU layers of `hidden_width` on both sides plus an affine
/// latent head on the encoder and an Identity output layer on the decoder.
/// The encoder head is latent_dim wide for FisherNet, 2·latent_dim for the
/// baseline (mean, then log-variance). Parameters are zero.
GenerativeModel build_architecture(std::size_t latent_dim, std::size_t data_dim, Variant variant,
                                   const ArchitectureOptions& options);

/// Fully connected layout used for Fashion-MNIST: 3 hidden layers of 448.
GenerativeModel build_paper_architecture(std::size_t latent_dim, std::size_t data_dim = 784,
                                         Variant variant = Variant::FisherNet);

/// Glorot-uniform weights, zero biases, xi_n = 0.
void initialize_weights(GenerativeModel& model, CounterRng& rng);

}  // namespace fishergen
