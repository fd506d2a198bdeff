#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "hrom/numerics/random.hpp"
#include "hrom/rom/hybrid_autoencoder.hpp"
#include "hrom/training/trainer.hpp"

namespace hrom {

/// Rows [cos(w_1 t) .. cos(w_n t), sin(w_1 t) .. sin(w_n t)], one per time.
DenseMatrix koopman_features(std::span<const double> omega, std::span<const double> times);

/// Frequency (radians per unit time) of the largest peak of the Hann-windowed
/// spectrum of a uniformly sampled series, refined within one bin to the
/// frequency whose least-squares sinusoid fit captures the most energy.
/// Returns nullopt when the series is constant.
std::optional<double> dominant_frequency(std::span<const double> series, double dt);

/// Decoder-only hybrid model evaluated on trigonometric features of learnable
/// frequencies. The frequencies live in the decoder's ParamStore as "omega"
/// (frequency group), so checkpoints reuse the model container.
class KoopmanModel {
 public:
  /// `decoder` must be decoder-only with an even rank; omega is added to it.
  KoopmanModel(HybridAutoencoder decoder, std::vector<double> omega, double dt);

  std::size_t n_frequencies() const noexcept { return decoder_.rank() / 2; }
  std::vector<double> omega() const;
  std::size_t omega_slot() const noexcept { return omega_slot_; }
  double dt() const noexcept { return dt_; }
  const HybridAutoencoder& decoder() const noexcept { return decoder_; }
  HybridAutoencoder& decoder() noexcept { return decoder_; }
  ParamStore& params() noexcept { return decoder_.params(); }
  const ParamStore& params() const noexcept { return decoder_.params(); }

  /// Standardized states at the given times, one row each.
  DenseMatrix decode_times(std::span<const double> times) const;
  /// `times` is a B x 1 column.
  Tape::Var decode(Tape& tape, Tape::Var times) const;

  Container to_container() const;
  static KoopmanModel from_container(const Container& c);

 private:
  HybridAutoencoder decoder_;
  std::size_t omega_slot_ = 0;
  double dt_ = 1.0;
};

/// Builds a Koopman model of `variant` with rank 2 n_frequencies. The POD part
/// comes from the train rows of `snapshots`; omega_j is seeded from the
/// dominant frequency of the j-th POD coefficient series of the train rows
/// (assumed in time order with spacing dt), or drawn uniform in (0, pi/dt) when
/// that series is flat.
KoopmanModel build_koopman(Variant variant, const SnapshotMatrix& snapshots, std::size_t n_frequencies,
                           const Architecture& architecture, double dt, RandomStream& stream);

/// Minimizes sum_i ||x_i - decode(t_i)||^2 over omega and the decoder. Errors in
/// the report are per-entry l2 errors of decode_times against the rows.
TrainReport train_koopman(KoopmanModel& model, const DenseMatrix& train, const std::vector<double>& train_times,
                          const DenseMatrix& test, const std::vector<double>& test_times, const TrainConfig& config);

}  // namespace hrom
