#include <benchmark/benchmark.h>

#include "hrom/data/ks.hpp"
#include "hrom/neural/tape.hpp"
#include "hrom/numerics/random.hpp"
#include "hrom/numerics/svd.hpp"
#include "hrom/rom/hybrid_autoencoder.hpp"
#include "hrom/surrogate/lstm.hpp"

using namespace hrom;

namespace {

DenseMatrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  RandomStream rs(seed);
  DenseMatrix a(m, n);
  for (double& v : a.flat()) v = rs.normal();
  return a;
}

void BM_ThinSvd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix a = random_matrix(2 * n, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(thin_svd(a, n / 4));
}
BENCHMARK(BM_ThinSvd)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_KsStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  KsConfig cfg;
  cfg.n = n;
  RandomStream rs(2);
  KsSolver solver(n, cfg.domain_length(), cfg.dt);
  solver.set_state(ks_initial_condition(cfg, rs));
  for (auto _ : state) solver.step();
}
BENCHMARK(BM_KsStep)->Arg(256)->Arg(512)->Arg(1024);

// One minibatch of the KS-sized hybrid: forward, backward.
void BM_HybridTrainStep(benchmark::State& state) {
  const auto r = static_cast<std::size_t>(state.range(0));
  const std::size_t f = 512, batch = 64;
  ModelSpec spec;
  spec.variant = Variant::LearnableWeightedHybrid;
  spec.rank = r;
  spec.n_cells = f;
  spec.architecture = Architecture::ks_default(r);
  PodBasis pod;
  pod.ur = DenseMatrix(f, r);
  for (std::size_t i = 0; i < r; ++i) pod.ur(i, i) = 1.0;
  pod.stats = Standardization::identity(f);
  RandomStream rs(3);
  HybridAutoencoder m = build_model(spec, pod, Standardization::identity(f), rs);
  const DenseMatrix x = random_matrix(batch, f, 4);
  for (auto _ : state) {
    Tape tape;
    Tape::Var in = tape.input(x);
    Tape::Var loss = tape.mse(m.reconstruct(tape, in), in);
    m.params().zero_grads();
    tape.backward(loss, m.params());
  }
}
BENCHMARK(BM_HybridTrainStep)->Arg(10)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_LstmWindow(benchmark::State& state) {
  const std::size_t k = 10, batch = 32;
  LstmNet net(3, {40, 40}, 2);
  RandomStream rs(5);
  net.initialize(rs);
  std::vector<DenseMatrix> steps;
  for (std::size_t t = 0; t < k; ++t) steps.push_back(random_matrix(batch, 3, 6 + t));
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(steps));
}
BENCHMARK(BM_LstmWindow)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
