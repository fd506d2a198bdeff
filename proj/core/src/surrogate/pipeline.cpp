#include "hrom/surrogate/pipeline.hpp"

#include <algorithm>
#include <map>

#include "hrom/errors.hpp"
#include "hrom/evaluation/metrics.hpp"

namespace hrom {

void SurrogateConfig::validate() const {
  if (rank == 0) throw ConfigError("surrogate.rank must be positive");
  if (window == 0) throw ConfigError("surrogate.window must be positive");
  if (lstm_hidden.empty()) throw ConfigError("surrogate.lstm_hidden must not be empty");
  autoencoder_train.validate();
  lstm_train.validate();
}

std::vector<std::vector<std::size_t>> trajectory_rows(const Dataset& dataset, const std::vector<std::size_t>& rows) {
  std::map<std::size_t, std::vector<std::size_t>> by_id;
  for (std::size_t i : rows) by_id[dataset.trajectory.at(i)].push_back(i);
  std::map<std::size_t, std::size_t> total;
  for (std::size_t t : dataset.trajectory) ++total[t];
  std::vector<std::vector<std::size_t>> out;
  for (auto& [id, r] : by_id) {
    if (r.size() != total[id]) continue;
    std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) { return dataset.time[a] < dataset.time[b]; });
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

DenseMatrix latent_series(const HybridAutoencoder& model, const SnapshotMatrix& s, const Dataset& d,
                          const std::vector<std::size_t>& rows, bool augment) {
  DenseMatrix z = model.encode(s.data.gather_rows(rows));
  if (!augment) return z;
  const double p = d.parameter.at(rows.front());
  return augment_latent(z, std::span<const double>(&p, 1));
}

}  // namespace

SurrogateResult run_surrogate(Variant variant, const Dataset& dataset, const Split& split,
                              const SurrogateConfig& config, std::uint64_t seed) {
  config.validate();
  dataset.validate();
  SurrogateResult result;
  result.variant = variant;
  result.seed = seed;

  const SnapshotMatrix s = standardize(dataset, split, config.standardize);
  RandomStream init(seed);
  HybridAutoencoder model = build_model(variant, s, config.rank, config.architecture, init);
  TrainConfig ae_cfg = config.autoencoder_train;
  ae_cfg.seed = seed;
  result.autoencoder_report = train_autoencoder(model, s, ae_cfg);

  const auto train_traj = trajectory_rows(dataset, split.train);
  const auto test_traj = trajectory_rows(dataset, split.test);
  if (train_traj.empty() || test_traj.empty()) throw DomainError("surrogate: needs complete train and test trajectories");

  std::vector<DenseMatrix> train_series, test_series;
  for (const auto& rows : train_traj) train_series.push_back(latent_series(model, s, dataset, rows, config.augment_parameter));
  for (const auto& rows : test_traj) test_series.push_back(latent_series(model, s, dataset, rows, config.augment_parameter));
  const Windows train_w = build_windows(train_series, config.window, config.rank);
  const Windows test_w = build_windows(test_series, config.window, config.rank);

  const std::size_t width = train_series.front().cols();
  LstmNet net(width, config.lstm_hidden, config.rank);
  RandomStream lstm_init(RandomStream::derive_seed(seed, 1));
  net.initialize(lstm_init);
  TrainConfig lstm_cfg = config.lstm_train;
  lstm_cfg.seed = RandomStream::derive_seed(seed, 2);
  result.lstm_report = train_lstm(net, train_w, test_w, lstm_cfg);

  for (std::size_t t = 0; t < test_traj.size(); ++t) {
    const auto& rows = test_traj[t];
    const DenseMatrix& series = test_series[t];
    const std::size_t k = config.window;
    std::vector<std::size_t> head(k), tail_rows(rows.begin() + static_cast<std::ptrdiff_t>(k), rows.end());
    for (std::size_t i = 0; i < k; ++i) head[i] = i;
    std::vector<double> params;
    if (config.augment_parameter) params.push_back(dataset.parameter.at(rows.front()));
    const DenseMatrix z = rollout(net, series.gather_rows(head), rows.size() - k, params);
    const DenseMatrix truth = s.data.gather_rows(tail_rows);
    TrajectoryError e;
    e.trajectory = dataset.trajectory.at(rows.front());
    e.parameter = dataset.parameter.at(rows.front());
    e.total = l2_error(truth, model.decode(z));
    e.reconstruction = l2_error(model, truth);
    result.test_trajectories.push_back(e);
    result.mean_total += e.total;
    result.mean_reconstruction += e.reconstruction;
  }
  result.autoencoder_checkpoint = model.to_container();
  result.lstm_checkpoint = net.to_container();
  result.mean_total /= static_cast<double>(result.test_trajectories.size());
  result.mean_reconstruction /= static_cast<double>(result.test_trajectories.size());
  return result;
}

}  // namespace hrom
