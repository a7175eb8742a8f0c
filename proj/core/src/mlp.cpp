#include "fishergen/mlp.hpp"

#include <cmath>
#include <string>

#include "fishergen/dual.hpp"
#include "fishergen/errors.hpp"

namespace fishergen {

MlpSpec MlpSpec::relu_chain(std::vector<std::size_t> widths) {
  MlpSpec spec;
  spec.layer_widths = std::move(widths);
  const std::size_t n = spec.layer_widths.empty() ? 0 : spec.layer_widths.size() - 1;
  spec.activations.assign(n, Activation::ReLU);
  if (n > 0) spec.activations.back() = Activation::Identity;
  return spec;
}

std::size_t MlpSpec::parameter_count() const {
  std::size_t count = 0;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    count += layer_widths[l] * layer_widths[l + 1] + layer_widths[l + 1];
  }
  return count;
}

void MlpSpec::validate() const {
  if (activations.empty()) throw ShapeError("MlpSpec: at least one layer required");
  if (layer_widths.size() != activations.size() + 1) {
    throw ShapeError("MlpSpec: need one more width than activations");
  }
  for (std::size_t w : layer_widths) {
    if (w == 0) throw ShapeError("MlpSpec: layer widths must be positive");
  }
}

ParamStore ParamStore::zeros(const MlpSpec& spec) {
  spec.validate();
  ParamStore p;
  p.layers.reserve(spec.layer_count());
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const std::size_t in = spec.layer_widths[l];
    const std::size_t out = spec.layer_widths[l + 1];
    p.layers.push_back({DenseArray({out, in}, 0.0), DenseArray({out}, 0.0)});
  }
  return p;
}

ParamStore ParamStore::zeros_like() const {
  ParamStore p;
  p.layers.reserve(layers.size());
  for (const auto& layer : layers) {
    p.layers.push_back({DenseArray(layer.weight.shape(), 0.0), DenseArray(layer.bias.shape(), 0.0)});
  }
  return p;
}

void ParamStore::append(const ParamStore& tail) {
  layers.insert(layers.end(), tail.layers.begin(), tail.layers.end());
}

std::size_t ParamStore::flat_size() const {
  std::size_t n = 1;
  for (const auto& layer : layers) n += layer.weight.size() + layer.bias.size();
  return n;
}

std::vector<double> ParamStore::flatten() const {
  std::vector<double> flat;
  flat.reserve(flat_size());
  for (const auto& layer : layers) {
    flat.insert(flat.end(), layer.weight.values().begin(), layer.weight.values().end());
    flat.insert(flat.end(), layer.bias.values().begin(), layer.bias.values().end());
  }
  flat.push_back(xi_n);
  return flat;
}

void ParamStore::assign_flat(std::span<const double> flat) {
  if (flat.size() != flat_size()) {
    throw ShapeError("ParamStore::assign_flat: expected " + std::to_string(flat_size()) +
                     " values, got " + std::to_string(flat.size()));
  }
  std::size_t i = 0;
  for_each_value([&](double& v) { v = flat[i++]; });
}

ParamStore init_params(const MlpSpec& spec, CounterRng& rng) {
  ParamStore p = ParamStore::zeros(spec);
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const double fan_in = static_cast<double>(spec.layer_widths[l]);
    const double fan_out = static_cast<double>(spec.layer_widths[l + 1]);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& w : p.layers[l].weight.values()) w = limit * (2.0 * rng.uniform() - 1.0);
  }
  return p;
}

namespace {

void check_layers(const MlpSpec& spec, LayerSpan layers) {
  spec.validate();
  if (layers.size() != spec.layer_count()) {
    throw ShapeError("mlp: spec has " + std::to_string(spec.layer_count()) +
                     " layers, params have " + std::to_string(layers.size()));
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& w = layers[l].weight;
    if (w.rank() != 2 || w.shape()[0] != spec.layer_widths[l + 1] ||
        w.shape()[1] != spec.layer_widths[l] || layers[l].bias.size() != spec.layer_widths[l + 1]) {
      throw ShapeError("mlp: layer " + std::to_string(l) + " weight shape " +
                       w.shape_string() + " inconsistent with spec");
    }
  }
}

void check_input(const MlpSpec& spec, const DenseArray& x, const char* what) {
  if ((x.rank() != 1 && x.rank() != 2) || x.cols() != spec.input_width()) {
    throw ShapeError(std::string(what) + ": expected width " + std::to_string(spec.input_width()) +
                     ", got shape " + x.shape_string());
  }
}

std::vector<std::size_t> shape_like(const DenseArray& x, std::size_t width) {
  if (x.rank() == 1) return {width};
  return {x.rows(), width};
}

// out[b, o] = bias[o] + sum_i in[b, i] * W[o, i]
void affine(const LayerParams& layer, const DenseArray& in, DenseArray& out) {
  const std::size_t rows = in.rows();
  const std::size_t n_in = layer.weight.shape()[1];
  const std::size_t n_out = layer.weight.shape()[0];
  const double* w = layer.weight.values().data();
  const double* b = layer.bias.values().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = in.values().data() + r * n_in;
    double* y = out.values().data() + r * n_out;
    for (std::size_t o = 0; o < n_out; ++o) {
      const double* wo = w + o * n_in;
      double s = b[o];
      for (std::size_t i = 0; i < n_in; ++i) s += wo[i] * x[i];
      y[o] = s;
    }
  }
}

void activate(Activation act, DenseArray& a) {
  if (act == Activation::ReLU) {
    for (double& v : a.values()) v = relu(v);
  }
}

}  // namespace

ForwardResult forward(const MlpSpec& spec, LayerSpan layers, const DenseArray& x) {
  check_layers(spec, layers);
  check_input(spec, x, "forward");
  ForwardResult result;
  Tape& tape = result.tape;
  tape.input = x;
  tape.layer_inputs.reserve(spec.layer_count());
  tape.pre_activations.reserve(spec.layer_count());
  DenseArray current = x;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    DenseArray pre(shape_like(x, spec.layer_widths[l + 1]));
    affine(layers[l], current, pre);
    tape.layer_inputs.push_back(std::move(current));
    current = pre;
    activate(spec.activations[l], current);
    tape.pre_activations.push_back(std::move(pre));
  }
  if (!current.all_finite()) throw NumericalError("forward: non-finite network output");
  tape.output = current;
  result.output = std::move(current);
  return result;
}

ForwardResult forward(const MlpSpec& spec, const ParamStore& params, const DenseArray& x) {
  return forward(spec, LayerSpan(params.layers), x);
}

DenseArray replay(const MlpSpec& spec, LayerSpan layers, const Tape& tape) {
  return forward(spec, layers, tape.input).output;
}

void vjp_accumulate(const MlpSpec& spec, LayerSpan layers, const Tape& tape,
                    const DenseArray& cotangent, std::span<LayerParams> grad_layers,
                    DenseArray* grad_x) {
  check_layers(spec, layers);
  if (tape.pre_activations.size() != spec.layer_count() ||
      tape.layer_inputs.size() != spec.layer_count()) {
    throw ShapeError("vjp: tape does not match spec");
  }
  if (cotangent.shape() != tape.output.shape()) {
    throw ShapeError("vjp: cotangent shape " + cotangent.shape_string() +
                     " does not match output " + tape.output.shape_string());
  }
  const bool want_params = !grad_layers.empty();
  if (want_params && grad_layers.size() != layers.size()) {
    throw ShapeError("vjp: gradient store has wrong layer count");
  }
  const std::size_t rows = cotangent.rows();
  DenseArray g = cotangent;
  for (std::size_t l = spec.layer_count(); l-- > 0;) {
    const std::size_t n_in = spec.layer_widths[l];
    const std::size_t n_out = spec.layer_widths[l + 1];
    if (spec.activations[l] == Activation::ReLU) {
      const auto& pre = tape.pre_activations[l].values();
      auto& gv = g.values();
      for (std::size_t i = 0; i < gv.size(); ++i) {
        if (!(pre[i] > 0.0)) gv[i] = 0.0;
      }
    }
    const DenseArray& in = tape.layer_inputs[l];
    const double* w = layers[l].weight.values().data();
    if (want_params) {
      double* gw = grad_layers[l].weight.values().data();
      double* gb = grad_layers[l].bias.values().data();
      for (std::size_t r = 0; r < rows; ++r) {
        const double* x = in.values().data() + r * n_in;
        const double* go = g.values().data() + r * n_out;
        for (std::size_t o = 0; o < n_out; ++o) {
          const double c = go[o];
          if (c == 0.0) continue;
          gb[o] += c;
          double* gwo = gw + o * n_in;
          for (std::size_t i = 0; i < n_in; ++i) gwo[i] += c * x[i];
        }
      }
    }
    if (l == 0 && grad_x == nullptr) break;
    DenseArray next(shape_like(cotangent, n_in), 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* go = g.values().data() + r * n_out;
      double* gi = next.values().data() + r * n_in;
      for (std::size_t o = 0; o < n_out; ++o) {
        const double c = go[o];
        if (c == 0.0) continue;
        const double* wo = w + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) gi[i] += c * wo[i];
      }
    }
    g = std::move(next);
  }
  if (grad_x != nullptr) *grad_x = std::move(g);
}

VjpResult vjp(const MlpSpec& spec, LayerSpan layers, const Tape& tape,
              const DenseArray& cotangent) {
  VjpResult result;
  result.grad_params = ParamStore::zeros(spec);
  vjp_accumulate(spec, layers, tape, cotangent, result.grad_params.layers, &result.grad_x);
  return result;
}

VjpResult vjp(const MlpSpec& spec, const ParamStore& params, const Tape& tape,
              const DenseArray& cotangent) {
  return vjp(spec, LayerSpan(params.layers), tape, cotangent);
}

DenseArray vjp_input(const MlpSpec& spec, LayerSpan layers, const Tape& tape,
                     const DenseArray& cotangent) {
  DenseArray grad_x;
  vjp_accumulate(spec, layers, tape, cotangent, {}, &grad_x);
  return grad_x;
}

DenseArray jvp(const MlpSpec& spec, LayerSpan layers, const DenseArray& x,
               const DenseArray& tangent) {
  check_layers(spec, layers);
  check_input(spec, x, "jvp");
  if (tangent.shape() != x.shape()) {
    throw ShapeError("jvp: tangent shape " + tangent.shape_string() + " does not match input " +
                     x.shape_string());
  }
  const std::size_t rows = x.rows();
  DenseArray out(shape_like(x, spec.output_width()));
  std::vector<Dual> current;
  std::vector<Dual> next;
  for (std::size_t r = 0; r < rows; ++r) {
    current.resize(spec.input_width());
    for (std::size_t i = 0; i < current.size(); ++i) current[i] = {x.row(r)[i], tangent.row(r)[i]};
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
      const std::size_t n_in = spec.layer_widths[l];
      const std::size_t n_out = spec.layer_widths[l + 1];
      const double* w = layers[l].weight.values().data();
      const double* b = layers[l].bias.values().data();
      next.assign(n_out, Dual{});
      for (std::size_t o = 0; o < n_out; ++o) {
        Dual s{b[o], 0.0};
        const double* wo = w + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) s += wo[i] * current[i];
        next[o] = spec.activations[l] == Activation::ReLU ? relu(s) : s;
      }
      current.swap(next);
    }
    auto dst = out.row(r);
    for (std::size_t o = 0; o < dst.size(); ++o) dst[o] = current[o].tangent;
  }
  if (!out.all_finite()) throw NumericalError("jvp: non-finite tangent");
  return out;
}

DenseArray jvp(const MlpSpec& spec, const ParamStore& params, const DenseArray& x,
               const DenseArray& tangent) {
  return jvp(spec, LayerSpan(params.layers), x, tangent);
}

}  // namespace fishergen
