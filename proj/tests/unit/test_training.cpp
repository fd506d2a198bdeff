#include <cmath>

#include "doctest.h"
#include "hrom/errors.hpp"
#include "hrom/evaluation/metrics.hpp"
#include "hrom/rom/pod.hpp"
#include "hrom/training/trainer.hpp"

using namespace hrom;

namespace {

DenseMatrix random_matrix(std::size_t m, std::size_t n, RandomStream& rs, double scale = 1.0) {
  DenseMatrix a(m, n);
  for (double& v : a.flat()) v = scale * rs.normal();
  return a;
}

SnapshotMatrix make_snapshots(const DenseMatrix& x) {
  SnapshotMatrix s;
  s.data = x;
  s.stats = Standardization::identity(x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) (i % 3 == 2 ? s.split.test : s.split.train).push_back(i);
  s.n_cells = x.cols();
  return s;
}

SnapshotMatrix low_rank_snapshots(std::uint64_t seed) {
  RandomStream rs(seed);
  DenseMatrix x = matmul(random_matrix(60, 3, rs), random_matrix(3, 16, rs, 0.5));
  DenseMatrix curve(60, 16);
  for (std::size_t i = 0; i < 60; ++i)
    for (std::size_t j = 0; j < 16; ++j) curve(i, j) = 0.3 * std::tanh(x(i, j));
  return make_snapshots(x + curve);
}

TrainConfig quick_config(std::size_t epochs) {
  TrainConfig c;
  c.epochs = epochs;
  c.batch_size = 8;
  c.eval_interval = 5;
  c.adam.set_group_lr(ParamGroup::Network, 1e-3);
  c.adam.set_group_lr(ParamGroup::Blend, 1e-3);
  return c;
}

}  // namespace

TEST_CASE("mse loss examples") {
  CHECK(mse_loss(DenseMatrix(3, 2, 1.5), DenseMatrix(3, 2, 1.5)) == 0.0);
  CHECK(mse_loss(DenseMatrix(1, 2, std::vector<double>{1, 2}), DenseMatrix(1, 2)) == 5.0);
  RandomStream rs(2);
  DenseMatrix a = random_matrix(7, 5, rs), b = random_matrix(7, 5, rs);
  double naive = 0.0;
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 5; ++j) naive += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
  CHECK(mse_loss(a, b) == doctest::Approx(naive / 7.0).epsilon(1e-12));
  CHECK(l2_error(a, b) == doctest::Approx(naive / 35.0).epsilon(1e-12));
  CHECK_THROWS_AS(mse_loss(a, DenseMatrix(7, 4)), ValidationError);
  CHECK_THROWS_AS(l2_error(DenseMatrix(), DenseMatrix()), DomainError);
}

TEST_CASE("zero epochs keeps the weighted hybrid equal to POD") {
  SnapshotMatrix s = low_rank_snapshots(1);
  RandomStream rs(3);
  HybridAutoencoder lwh = build_model(Variant::LearnableWeightedHybrid, s, 2, Architecture::ks_default(2), rs);
  TrainReport r = train_autoencoder(lwh, s, quick_config(0));
  CHECK(r.history.empty());
  CHECK(std::abs(r.final_test_error - l2_error(s.test(), lwh.pod()->reconstruct(s.test()))) <= 1e-12);
}

TEST_CASE("training lowers the loss and never loses to POD at the best checkpoint") {
  SnapshotMatrix s = low_rank_snapshots(4);
  const double pod_train = l2_error(s.train(), compute_pod(s, 2).reconstruct(s.train()));
  for (Variant v : {Variant::Ae, Variant::SimpleHybrid, Variant::LearnableWeightedHybrid}) {
    RandomStream rs(5);
    HybridAutoencoder m = build_model(v, s, 2, Architecture::ks_default(2), rs);
    TrainReport r = train_autoencoder(m, s, quick_config(40));
    CHECK(r.final_train_error <= r.initial_train_error);
    CHECK(r.history.size() == 40);
    for (const EpochRecord& e : r.history) CHECK((std::isfinite(e.train_loss) && e.train_loss >= 0.0));
    if (v == Variant::LearnableWeightedHybrid) {
      CHECK(r.initial_train_error <= pod_train + 1e-10);
      CHECK(r.best_train_error <= pod_train);
    }
  }
}

TEST_CASE("rank one data is learned to near zero loss") {
  RandomStream rs(6);
  DenseMatrix v = random_matrix(1, 6, rs);
  v *= 1.0 / std::sqrt(squared_norm(v));
  DenseMatrix x(40, 6);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 6; ++j) x(i, j) = std::sin(0.3 * static_cast<double>(i)) * v(0, j);
  SnapshotMatrix s = make_snapshots(x);
  for (Variant var : {Variant::Pod, Variant::LearnableWeightedHybrid, Variant::Ae}) {
    RandomStream init(8);
    Architecture arch;
    arch.encoder_hidden = {};
    arch.decoder_hidden = {};
    arch.activation = Activation::Linear;
    HybridAutoencoder m = build_model(var, s, 1, arch, init);
    TrainConfig c = quick_config(1500);
    c.adam.set_group_lr(ParamGroup::Network, 3e-2);
    c.eval_interval = 0;
    // one triangular cycle over the run, ending at a small rate
    c.schedule = {LrSchedule::Kind::Cyclic, 0.001, 1500 * 4};
    TrainReport r = train_autoencoder(m, s, c);
    CAPTURE(to_string(var));
    CHECK(r.final_train_error < 1e-6);
  }
}

TEST_CASE("training is bit-deterministic per seed") {
  SnapshotMatrix s = low_rank_snapshots(9);
  auto run = [&](std::uint64_t seed) {
    RandomStream rs(seed);
    HybridAutoencoder m = build_model(Variant::LearnableWeightedHybrid, s, 2, Architecture::ks_default(2), rs);
    TrainConfig c = quick_config(10);
    c.seed = seed;
    c.schedule.kind = LrSchedule::Kind::Cyclic;
    c.schedule.period = 12;
    TrainReport r = train_autoencoder(m, s, c);
    std::vector<double> out{r.final_train_error, r.final_test_error, r.best_train_error};
    for (const EpochRecord& e : r.history) out.push_back(e.train_loss);
    return out;
  };
  CHECK(run(11) == run(11));
  CHECK(run(11) != run(12));
}

TEST_CASE("non-finite loss aborts and restores the epoch start") {
  auto make_store = [] {
    ParamStore store;
    store.add("w", DenseMatrix(1, 2, 0.5), ParamGroup::Network);
    return store;
  };
  auto make_loss = [](ParamStore& store, int& calls) {
    return [&store, &calls](Tape& tape, const std::vector<std::size_t>&) {
      ++calls;
      DenseMatrix target(1, 2, calls >= 4 ? std::nan("") : 1.0);
      return tape.mse(tape.parameter(store, 0), tape.input(target));
    };
  };
  auto eval = [] { return EvalPoint{}; };
  TrainConfig c;
  c.batch_size = 1;
  c.adam.set_group_lr(ParamGroup::Network, 0.1);

  // Reference: one clean epoch of two batches.
  ParamStore ref = make_store();
  int ref_calls = 0;
  c.epochs = 1;
  run_training(ref, 2, make_loss(ref, ref_calls), eval, c, 1.0);

  // The fourth batch (second batch of epoch 2) produces a NaN loss.
  ParamStore store = make_store();
  int calls = 0;
  c.epochs = 5;
  try {
    run_training(store, 2, make_loss(store, calls), eval, c, 1.0);
    FAIL("expected an OptimizationError");
  } catch (const OptimizationError& e) {
    CHECK(std::string(e.what()).find("epoch 2") != std::string::npos);
  }
  CHECK(calls == 4);
  CHECK(store.flat_values() == ref.flat_values());
}

TEST_CASE("ensemble aggregation") {
  SnapshotMatrix s = low_rank_snapshots(13);
  TrainConfig c = quick_config(3);
  SUBCASE("single seed aggregate is the run itself") {
    EnsembleResult r = ensemble_train(Variant::Ae, s, {2}, {5}, c);
    REQUIRE(r.members.size() == 1);
    CHECK(r.aggregates[0].mean_test == r.members[0].report->final_test_error);
    CHECK(r.aggregates[0].std_test == 0.0);
  }
  SUBCASE("POD has zero spread across seeds") {
    EnsembleResult r = ensemble_train(Variant::Pod, s, {1, 2}, {1, 2, 3}, c);
    CHECK(r.aggregates.size() == 2);
    CHECK(r.aggregates[1].std_test == 0.0);
    CHECK(r.aggregates[1].std_train == 0.0);
  }
  SUBCASE("mean over members and worker independence") {
    EnsembleOptions serial;
    EnsembleOptions threaded;
    threaded.workers = 3;
    EnsembleResult a = ensemble_train(Variant::LearnableWeightedHybrid, s, {2, 3}, {1, 2, 3}, c, serial);
    EnsembleResult b = ensemble_train(Variant::LearnableWeightedHybrid, s, {2, 3}, {1, 2, 3}, c, threaded);
    double sum = 0.0;
    for (std::size_t i = 3; i < 6; ++i) sum += a.members[i].report->final_test_error;
    CHECK(a.aggregates[1].mean_test == doctest::Approx(sum / 3.0).epsilon(1e-12));
    for (std::size_t i = 0; i < a.members.size(); ++i)
      CHECK(a.members[i].report->final_test_error == b.members[i].report->final_test_error);
  }
  SUBCASE("failures are recorded and survivors aggregated") {
    EnsembleResult r = ensemble_train(Variant::LearnableWeightedHybrid, s, {2, 100}, {1}, c);
    CHECK(r.aggregates[0].n_ok == 1);
    CHECK(r.aggregates[1].n_failed == 1);
    CHECK(r.warnings.size() == 1);
  }
  CHECK_THROWS_AS(ensemble_train(Variant::Ae, s, {2}, {}, c), ConfigError);
}
