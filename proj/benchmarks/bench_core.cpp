#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "fishergen/loss.hpp"
#include "fishergen/metric.hpp"
#include "fishergen/mlp.hpp"
#include "fishergen/model.hpp"
#include "fishergen/rng.hpp"

using namespace fishergen;

namespace {

// Fashion-MNIST sized decoder (3 x 448, 784 pixels) at latent_dim = range(0).
GenerativeModel paper_model(std::size_t latent) {
  GenerativeModel m = build_paper_architecture(latent);
  CounterRng rng(1);
  initialize_weights(m, rng);
  return m;
}

DenseArray normal_array(std::size_t rows, std::size_t cols, std::uint64_t stream) {
  CounterRng rng = CounterRng::derive(9, stream);
  DenseArray a({rows, cols});
  for (double& v : a.values()) v = rng.normal();
  return a;
}

DenseArray uniform_array(std::size_t rows, std::size_t cols, std::uint64_t stream) {
  CounterRng rng = CounterRng::derive(9, stream);
  DenseArray a({rows, cols});
  for (double& v : a.values()) v = rng.uniform();
  return a;
}

void BM_DecoderForward(benchmark::State& state) {
  const GenerativeModel m = paper_model(state.range(0));
  const DenseArray z = normal_array(1, m.latent_dim(), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(m.decoder_spec(), m.decoder_layers(), z));
  }
}
BENCHMARK(BM_DecoderForward)->Arg(2)->Arg(16);

void BM_DecoderVjp(benchmark::State& state) {
  const GenerativeModel m = paper_model(state.range(0));
  const DenseArray z = normal_array(1, m.latent_dim(), 1);
  const ForwardResult fr = forward(m.decoder_spec(), m.decoder_layers(), z);
  const DenseArray cot = normal_array(1, m.data_dim(), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vjp(m.decoder_spec(), m.decoder_layers(), fr.tape, cot));
  }
}
BENCHMARK(BM_DecoderVjp)->Arg(2)->Arg(16);

void BM_DecoderJvp(benchmark::State& state) {
  const GenerativeModel m = paper_model(state.range(0));
  const DenseArray z = normal_array(1, m.latent_dim(), 1);
  const DenseArray t = normal_array(1, m.latent_dim(), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(jvp(m.decoder_spec(), m.decoder_layers(), z, t));
  }
}
BENCHMARK(BM_DecoderJvp)->Arg(2)->Arg(16);

void BM_MetricApply(benchmark::State& state) {
  const GenerativeModel m = paper_model(state.range(0));
  const MetricOperator op(m, DenseArray::vector(normal_array(1, m.latent_dim(), 1).values()));
  const std::vector<double> v = normal_array(1, m.latent_dim(), 4).values();
  std::vector<double> out(v.size());
  for (auto _ : state) {
    op.apply(v, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_MetricApply)->Arg(2)->Arg(16);

void BM_CgSolve(benchmark::State& state) {
  const GenerativeModel m = paper_model(state.range(0));
  const MetricOperator op(m, DenseArray::vector(normal_array(1, m.latent_dim(), 1).values()));
  const std::vector<double> b = normal_array(1, m.latent_dim(), 5).values();
  std::size_t iterations = 0;
  for (auto _ : state) {
    const CgSolution s = cg_solve(op.as_matvec(), b, {});
    iterations = s.report.iterations;
    benchmark::DoNotOptimize(s.x.data());
  }
  state.counters["cg_iters"] = static_cast<double>(iterations);
}
BENCHMARK(BM_CgSolve)->Arg(2)->Arg(16);

void BM_DrawLatentSample(benchmark::State& state) {
  const GenerativeModel m = paper_model(state.range(0));
  const MetricOperator op(m, DenseArray::vector(normal_array(1, m.latent_dim(), 1).values()));
  CounterRng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(draw_latent_sample(op, rng, {}));
  }
}
BENCHMARK(BM_DrawLatentSample)->Arg(2)->Arg(16);

// One optimizer step's worth of work: sampling plus objective and gradient
// for a batch of 64 images.
void BM_BackpropObjective(benchmark::State& state) {
  const Variant variant = state.range(0) == 0 ? Variant::FisherNet : Variant::BaselineVAE;
  GenerativeModel m = build_paper_architecture(2, 784, variant);
  CounterRng init(1);
  initialize_weights(m, init);
  const DenseArray batch = uniform_array(64, 784, 6);
  CounterRng rng(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(backprop_objective(m, batch, 60000, rng));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_BackpropObjective)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
