#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hrom/data/dataset.hpp"
#include "hrom/rom/hybrid_autoencoder.hpp"
#include "hrom/surrogate/lstm.hpp"
#include "hrom/training/trainer.hpp"

namespace hrom {

/// Two-stage surrogate: an autoencoder compresses each snapshot, then an LSTM
/// advances the latent state, optionally augmented with the trajectory
/// parameter (Re for Burgers).
struct SurrogateConfig {
  std::size_t rank = 2;
  Architecture architecture{{4}, {4}};
  std::size_t window = 10;
  std::vector<std::size_t> lstm_hidden{40, 40};
  bool augment_parameter = true;
  bool standardize = false;
  TrainConfig autoencoder_train;
  TrainConfig lstm_train;

  void validate() const;
};

struct TrajectoryError {
  std::size_t trajectory = 0;
  double parameter = 0.0;
  double total = 0.0;           ///< decoded rollout against the truth
  double reconstruction = 0.0;  ///< reconstruct(truth) against the truth, same steps
};

struct SurrogateResult {
  Variant variant = Variant::Pod;
  std::uint64_t seed = 0;
  TrainReport autoencoder_report;
  TrainReport lstm_report;
  std::vector<TrajectoryError> test_trajectories;
  double mean_total = 0.0;
  double mean_reconstruction = 0.0;
  Container autoencoder_checkpoint;
  Container lstm_checkpoint;
};

/// Rows of each trajectory in time order, keyed by the dataset's trajectory id
/// (ascending). Only trajectories whose rows are all in `rows` are returned.
std::vector<std::vector<std::size_t>> trajectory_rows(const Dataset& dataset, const std::vector<std::size_t>& rows);

/// Trains the autoencoder on split.train, encodes every trajectory, trains the
/// LSTM on the train trajectories (test trajectories are the LSTM's test
/// windows), then rolls out each test trajectory from its first `window`
/// encoded states. Errors cover steps window..nt-1 in the snapshot units.
SurrogateResult run_surrogate(Variant variant, const Dataset& dataset, const Split& split,
                              const SurrogateConfig& config, std::uint64_t seed);

}  // namespace hrom
