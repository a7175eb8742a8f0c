#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fishergen/array.hpp"
#include "fishergen/rng.hpp"

namespace fishergen {

enum class Activation : std::uint8_t { Identity = 0, ReLU = 1 };

/// Architecture of a feed-forward chain of affine layers.
///
/// `layer_widths` lists input width, hidden widths and output width, so a
/// network with n affine layers has n + 1 widths and n activations.
struct MlpSpec {
  std::vector<std::size_t> layer_widths;
  std::vector<Activation> activations;

  /// ReLU on every layer except an Identity output layer.
  static MlpSpec relu_chain(std::vector<std::size_t> widths);

  std::size_t layer_count() const { return activations.size(); }
  std::size_t input_width() const { return layer_widths.front(); }
  std::size_t output_width() const { return layer_widths.back(); }
  std::size_t parameter_count() const;

  /// Throws ShapeError unless there is at least one layer and all widths are
  /// positive.
  void validate() const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

struct LayerParams {
  DenseArray weight;  // [out, in]
  DenseArray bias;    // [out]

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

/// Per-layer weights plus the scalar noise parameter xi_n.
///
/// Flat order (checkpoints, finite differences, Adam): layers by ascending
/// index, each layer's weight row-major followed by its bias, xi_n last.
struct ParamStore {
  std::vector<LayerParams> layers;
  double xi_n = 0.0;

  static ParamStore zeros(const MlpSpec& spec);
  /// Same layout, every entry zero.
  ParamStore zeros_like() const;
  /// Append the layers of `tail` after ours; xi_n is kept from *this.
  void append(const ParamStore& tail);

  std::size_t flat_size() const;
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> flat);

  /// Visit every parameter slot in flat order, xi_n included.
  template <class F>
  void for_each_value(F&& f) {
    for (auto& layer : layers) {
      for (double& w : layer.weight.values()) f(w);
      for (double& b : layer.bias.values()) f(b);
    }
    f(xi_n);
  }

  friend bool operator==(const ParamStore&, const ParamStore&) = default;
};

/// Glorot-uniform weights in ±sqrt(6 / (fan_in + fan_out)), zero biases.
ParamStore init_params(const MlpSpec& spec, CounterRng& rng);

/// Primal values recorded by forward(); enough for a reverse pass.
struct Tape {
  DenseArray input;
  /// Input to layer l (the input itself for l = 0).
  std::vector<DenseArray> layer_inputs;
  std::vector<DenseArray> pre_activations;
  DenseArray output;
};

using LayerSpan = std::span<const LayerParams>;

struct ForwardResult {
  DenseArray output;
  Tape tape;
};

/// Evaluate the chain on x, either a single row [in] or a batch [b, in].
/// Throws ShapeError on width mismatch and NumericalError on non-finite output.
ForwardResult forward(const MlpSpec& spec, LayerSpan layers, const DenseArray& x);
ForwardResult forward(const MlpSpec& spec, const ParamStore& params, const DenseArray& x);

/// Recompute the chain from tape.input.
DenseArray replay(const MlpSpec& spec, LayerSpan layers, const Tape& tape);

struct VjpResult {
  DenseArray grad_x;
  ParamStore grad_params;
};

/// Reverse pass: grad_x = Jᵀ·cotangent at the tape's input, grad_params are
/// the gradients of <cotangent, y>, summed over batch rows.
VjpResult vjp(const MlpSpec& spec, LayerSpan layers, const Tape& tape,
              const DenseArray& cotangent);
VjpResult vjp(const MlpSpec& spec, const ParamStore& params, const Tape& tape,
              const DenseArray& cotangent);

/// Reverse pass that only propagates to the input.
DenseArray vjp_input(const MlpSpec& spec, LayerSpan layers, const Tape& tape,
                     const DenseArray& cotangent);

/// Reverse pass that adds parameter gradients into `grad_layers` and,
/// when `grad_x` is non-null, writes the input gradient.
void vjp_accumulate(const MlpSpec& spec, LayerSpan layers, const Tape& tape,
                    const DenseArray& cotangent, std::span<LayerParams> grad_layers,
                    DenseArray* grad_x);

/// Forward-mode J·tangent at x by a dual-number pass. x and tangent share a
/// shape (single row or batch of rows, one tangent per row).
DenseArray jvp(const MlpSpec& spec, LayerSpan layers, const DenseArray& x,
               const DenseArray& tangent);
DenseArray jvp(const MlpSpec& spec, const ParamStore& params, const DenseArray& x,
               const DenseArray& tangent);

}  // namespace fishergen
