#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hrom/neural/adam.hpp"
#include "hrom/neural/param_store.hpp"
#include "hrom/neural/tape.hpp"
#include "hrom/rom/hybrid_autoencoder.hpp"

namespace hrom {

struct TrainConfig {
  std::size_t epochs = 2000;
  std::size_t batch_size = 64;
  AdamConfig adam;  ///< per-group rates: network 1e-4, blend 1e-5, frequency 3e-4
  LrSchedule schedule;
  std::uint64_t seed = 0;
  bool shuffle = true;
  /// Full train/test evaluation every this many epochs (plus epoch 0 and the
  /// last epoch). 0 evaluates only at the ends.
  std::size_t eval_interval = 100;
  /// Caps the minibatches per epoch (0 = the whole train split).
  std::size_t max_batches_per_epoch = 0;
  /// Off by default.
  double weight_decay = 0.0;
  double clip_norm = 0.0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;      ///< 1-based
  double train_loss = 0.0;    ///< mean minibatch loss, per entry
  double wall_ms = 0.0;
};

struct EvalPoint {
  std::size_t epoch = 0;
  double train_error = 0.0;
  double test_error = 0.0;
};

struct TrainReport {
  std::uint64_t seed = 0;
  std::vector<EpochRecord> history;
  std::vector<EvalPoint> evaluations;
  double initial_train_error = 0.0;
  double final_train_error = 0.0;
  double final_test_error = 0.0;
  /// Checkpoint with the lowest full train error among the evaluations.
  std::size_t best_epoch = 0;
  double best_train_error = 0.0;
  double best_test_error = 0.0;
  double mean_epoch_ms = 0.0;
};

/// (1/M) sum_i ||x_i - xhat_i||^2. Throws ValidationError on shape mismatch.
double mse_loss(const DenseMatrix& x, const DenseMatrix& xhat);

/// Records the loss of one minibatch (given as row indices) on the tape.
using BatchLoss = std::function<Tape::Var(Tape& tape, const std::vector<std::size_t>& rows)>;
/// Full-set (train, test) errors of the current parameters.
using Evaluator = std::function<EvalPoint()>;

/// Minibatch Adam over `params`. `loss_scale` converts the tape loss into the
/// per-entry number stored in the history. The epoch order comes from
/// RandomStream(derive_seed(seed, epoch)). On a non-finite loss or gradient the
/// parameters are restored to the start of the failing epoch and an
/// OptimizationError naming the epoch is thrown.
/// When `keep_best` is set the parameters of the best evaluation are written
/// there (flat, slot order).
TrainReport run_training(ParamStore& params, std::size_t n_rows, const BatchLoss& batch_loss,
                         const Evaluator& evaluate, const TrainConfig& config, double loss_scale,
                         std::vector<double>* keep_best = nullptr);

/// Trains on snapshots.train(); errors are l2_error on the train and test
/// splits. The POD variant has nothing to train and returns its closed-form
/// errors with an empty history.
TrainReport train_autoencoder(HybridAutoencoder& model, const SnapshotMatrix& snapshots, const TrainConfig& config);

struct EnsembleMember {
  std::size_t rank = 0;
  std::uint64_t seed = 0;
  std::optional<TrainReport> report;
  std::optional<HybridAutoencoder> model;  ///< kept only when requested
  std::string error;                       ///< non-empty when the member failed
};

struct EnsembleAggregate {
  std::size_t rank = 0;
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;
  double mean_train = 0.0;
  double std_train = 0.0;
  double mean_test = 0.0;
  double std_test = 0.0;
};

struct EnsembleResult {
  Variant variant = Variant::Pod;
  std::vector<EnsembleMember> members;  ///< rank-major, then seed order
  std::vector<EnsembleAggregate> aggregates;
  std::vector<std::string> warnings;
};

struct EnsembleOptions {
  std::size_t workers = 1;
  bool keep_models = false;
  /// Hidden widths per rank; defaults to Architecture::ks_default(rank).
  std::function<Architecture(std::size_t rank)> architecture;
};

/// One independent model per (rank, seed); member i trains with config.seed =
/// seed. The POD basis is computed once per rank and shared.
EnsembleResult ensemble_train(Variant variant, const SnapshotMatrix& snapshots, const std::vector<std::size_t>& ranks,
                              const std::vector<std::uint64_t>& seeds, const TrainConfig& config,
                              const EnsembleOptions& options = {});

/// Mean and population std.
std::pair<double, double> mean_std(const std::vector<double>& values);

}  // namespace hrom
