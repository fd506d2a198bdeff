#include "hrom/training/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "hrom/errors.hpp"
#include "hrom/evaluation/metrics.hpp"
#include "hrom/rom/pod.hpp"
#include "hrom/util/parallel.hpp"

namespace hrom {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train.batch_size must be at least 1");
  for (double lr : adam.lr)
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("train learning rates must be finite and non-negative");
  if (schedule.kind == LrSchedule::Kind::Cyclic && schedule.period == 1)
    throw ConfigError("train.schedule.period must be 0 or at least 2");
  if (!(schedule.low_fraction > 0.0 && schedule.low_fraction <= 1.0))
    throw ConfigError("train.schedule.low_fraction must lie in (0, 1]");
  if (weight_decay < 0.0 || clip_norm < 0.0) throw ConfigError("train.weight_decay and train.clip_norm must be >= 0");
}

double mse_loss(const DenseMatrix& x, const DenseMatrix& xhat) {
  require_same_shape(x, xhat, "mse_loss");
  if (x.rows() == 0) throw DomainError("mse_loss: empty batch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x.data()[i] - xhat.data()[i];
    sum += d * d;
  }
  return sum / static_cast<double>(x.rows());
}

namespace {

void regularize(ParamStore& params, const TrainConfig& config) {
  if (config.weight_decay > 0.0)
    for (Tensor& t : params)
      if (t.group == ParamGroup::Network)
        for (std::size_t i = 0; i < t.value.size(); ++i) t.grad.data()[i] += config.weight_decay * t.value.data()[i];
  if (config.clip_norm > 0.0) {
    double sq = 0.0;
    for (const Tensor& t : params) sq += squared_norm(t.grad);
    const double norm = std::sqrt(sq);
    if (norm > config.clip_norm)
      for (Tensor& t : params) t.grad *= config.clip_norm / norm;
  }
}

}  // namespace

TrainReport run_training(ParamStore& params, std::size_t n_rows, const BatchLoss& batch_loss,
                         const Evaluator& evaluate, const TrainConfig& config, double loss_scale,
                         std::vector<double>* keep_best) {
  config.validate();
  if (n_rows == 0) throw DomainError("training: no training rows");
  using clock = std::chrono::steady_clock;

  TrainReport report;
  report.seed = config.seed;
  Adam adam(params, config.adam);

  auto record_eval = [&](std::size_t epoch) {
    EvalPoint p = evaluate();
    p.epoch = epoch;
    if (!std::isfinite(p.train_error)) throw OptimizationError("training: non-finite train error at epoch " + std::to_string(epoch));
    if (report.evaluations.empty() || p.train_error < report.best_train_error) {
      report.best_epoch = epoch;
      report.best_train_error = p.train_error;
      report.best_test_error = p.test_error;
      if (keep_best) *keep_best = params.flat_values();
    }
    report.evaluations.push_back(p);
  };

  record_eval(0);
  report.initial_train_error = report.evaluations.front().train_error;

  std::vector<std::size_t> order(n_rows);
  std::size_t n_batches = (n_rows + config.batch_size - 1) / config.batch_size;
  if (config.max_batches_per_epoch > 0) n_batches = std::min(n_batches, config.max_batches_per_epoch);
  std::vector<std::size_t> rows;
  double total_ms = 0.0;
  LrSchedule schedule = config.schedule;
  if (schedule.period == 0) schedule.period = std::max<std::size_t>(2, config.epochs * n_batches);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto t0 = clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (config.shuffle) {
      RandomStream rs(RandomStream::derive_seed(config.seed, epoch));
      for (std::size_t i = n_rows - 1; i > 0; --i)
        std::swap(order[i], order[static_cast<std::size_t>(rs.uniform_int(0, static_cast<std::int64_t>(i)))]);
    }
    const std::vector<double> epoch_start = params.flat_values();
    double loss_sum = 0.0;
    try {
      for (std::size_t b = 0; b < n_batches; ++b) {
        const std::size_t begin = b * config.batch_size;
        const std::size_t end = std::min(n_rows, begin + config.batch_size);
        rows.assign(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end));
        Tape tape;
        Tape::Var loss = batch_loss(tape, rows);
        params.zero_grads();
        tape.backward(loss, params);
        loss_sum += tape.value(loss)(0, 0);
        regularize(params, config);
        adam.step(params, schedule.multiplier(adam.steps()));
      }
    } catch (const OptimizationError& e) {
      params.assign_flat_values(epoch_start);
      throw OptimizationError("epoch " + std::to_string(epoch) + ": " + e.what());
    }
    const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    total_ms += ms;
    report.history.push_back({epoch, loss_scale * loss_sum / static_cast<double>(n_batches), ms});
    if ((config.eval_interval > 0 && epoch % config.eval_interval == 0) || epoch == config.epochs) record_eval(epoch);
  }

  report.final_train_error = report.evaluations.back().train_error;
  report.final_test_error = report.evaluations.back().test_error;
  report.mean_epoch_ms = config.epochs > 0 ? total_ms / static_cast<double>(config.epochs) : 0.0;
  return report;
}

TrainReport train_autoencoder(HybridAutoencoder& model, const SnapshotMatrix& snapshots, const TrainConfig& config) {
  const DenseMatrix train = snapshots.train();
  const DenseMatrix test = snapshots.test();
  auto evaluate = [&] {
    EvalPoint p;
    p.train_error = l2_error(model, train);
    p.test_error = test.rows() > 0 ? l2_error(model, test) : std::nan("");
    return p;
  };
  if (!uses_network(model.variant())) {
    config.validate();
    TrainReport report;
    report.seed = config.seed;
    EvalPoint p = evaluate();
    report.evaluations.push_back(p);
    report.initial_train_error = report.final_train_error = report.best_train_error = p.train_error;
    report.final_test_error = report.best_test_error = p.test_error;
    return report;
  }
  auto batch_loss = [&](Tape& tape, const std::vector<std::size_t>& rows) {
    Tape::Var x = tape.input(train.gather_rows(rows));
    return tape.mse(model.reconstruct(tape, x), x);
  };
  return run_training(model.params(), train.rows(), batch_loss, evaluate, config,
                      1.0 / static_cast<double>(model.n_features()));
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {std::nan(""), std::nan("")};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

EnsembleResult ensemble_train(Variant variant, const SnapshotMatrix& snapshots, const std::vector<std::size_t>& ranks,
                              const std::vector<std::uint64_t>& seeds, const TrainConfig& config,
                              const EnsembleOptions& options) {
  if (ranks.empty()) throw ConfigError("ensemble: rank list is empty");
  if (seeds.empty()) throw ConfigError("ensemble: seed list is empty");
  config.validate();

  std::vector<std::optional<PodBasis>> bases(ranks.size());
  std::vector<std::string> basis_error(ranks.size());
  if (uses_pod(variant)) {
    const PodSpectrum spectrum = pod_spectrum(snapshots.train());
    for (std::size_t k = 0; k < ranks.size(); ++k) {
      try {
        bases[k] = pod_from_spectrum(spectrum, ranks[k], snapshots.stats);
      } catch (const Error& e) {
        basis_error[k] = e.what();
      }
    }
  }

  EnsembleResult result;
  result.variant = variant;
  result.members.resize(ranks.size() * seeds.size());
  parallel_for(result.members.size(), options.workers, [&](std::size_t i) {
    const std::size_t k = i / seeds.size();
    EnsembleMember& m = result.members[i];
    m.rank = ranks[k];
    m.seed = seeds[i % seeds.size()];
    try {
      if (!basis_error[k].empty()) throw DomainError(basis_error[k]);
      ModelSpec spec;
      spec.variant = variant;
      spec.rank = m.rank;
      spec.n_cells = snapshots.n_cells;
      spec.n_components = snapshots.n_components;
      spec.architecture = options.architecture ? options.architecture(m.rank) : Architecture::ks_default(m.rank);
      RandomStream init(m.seed);
      HybridAutoencoder model = build_model(spec, bases[k], snapshots.stats, init);
      TrainConfig cfg = config;
      cfg.seed = m.seed;
      m.report = train_autoencoder(model, snapshots, cfg);
      if (options.keep_models) m.model = std::move(model);
    } catch (const Error& e) {
      m.error = e.what();
    }
  });

  for (std::size_t k = 0; k < ranks.size(); ++k) {
    EnsembleAggregate agg;
    agg.rank = ranks[k];
    std::vector<double> train, test;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const EnsembleMember& m = result.members[k * seeds.size() + s];
      if (!m.report) {
        ++agg.n_failed;
        result.warnings.push_back(std::string(to_string(variant)) + " rank " + std::to_string(m.rank) + " seed " +
                                  std::to_string(m.seed) + " failed: " + m.error);
        continue;
      }
      train.push_back(m.report->final_train_error);
      test.push_back(m.report->final_test_error);
    }
    agg.n_ok = train.size();
    std::tie(agg.mean_train, agg.std_train) = mean_std(train);
    std::tie(agg.mean_test, agg.std_test) = mean_std(test);
    result.aggregates.push_back(agg);
  }
  return result;
}

}  // namespace hrom
