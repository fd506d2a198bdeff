#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hrom/neural/container.hpp"
#include "hrom/neural/param_store.hpp"
#include "hrom/neural/tape.hpp"
#include "hrom/numerics/random.hpp"
#include "hrom/training/trainer.hpp"

namespace hrom {

/// Stacked LSTM with a linear head on the last hidden state.
///
/// Layer l holds "lstm<l>.W" of shape (in + H) x 4H and "lstm<l>.b" (1 x 4H);
/// the column blocks are the input, forget, candidate and output gates in
/// that order. Batches are rows.
class LstmNet {
 public:
  struct Cell {
    std::size_t weight_slot = 0;
    std::size_t bias_slot = 0;
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
  };

  LstmNet() = default;
  /// Zero-valued parameters; `hidden` lists the width of each layer.
  LstmNet(std::size_t input_size, const std::vector<std::size_t>& hidden, std::size_t output_size);

  /// Entries ~ U(-1/sqrt(H), 1/sqrt(H)) per layer, head included.
  void initialize(RandomStream& stream);

  std::size_t input_size() const noexcept { return cells_.empty() ? 0 : cells_.front().input_size; }
  std::size_t output_size() const noexcept { return output_size_; }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  ParamStore& params() noexcept { return params_; }
  const ParamStore& params() const noexcept { return params_; }

  /// One cell update. Returns (h', c').
  std::pair<DenseMatrix, DenseMatrix> step(std::size_t layer, const DenseMatrix& x, const DenseMatrix& h,
                                           const DenseMatrix& c) const;
  std::pair<Tape::Var, Tape::Var> step(Tape& tape, std::size_t layer, Tape::Var x, Tape::Var h, Tape::Var c) const;

  /// Runs the sequence from a zero state and applies the head to the final
  /// top-layer hidden state. `steps` holds one B x input matrix per time step.
  DenseMatrix forward(const std::vector<DenseMatrix>& steps) const;
  Tape::Var forward(Tape& tape, const std::vector<Tape::Var>& steps) const;

  Container to_container() const;
  static LstmNet from_container(const Container& c);

 private:
  ParamStore params_;
  std::vector<Cell> cells_;
  std::size_t head_weight_ = 0;
  std::size_t head_bias_ = 0;
  std::size_t output_size_ = 0;
};

/// [z, params] for every row of z.
DenseMatrix augment_latent(const DenseMatrix& z, std::span<const double> params);

/// Sliding windows over a set of trajectories. Row w of `inputs` is the
/// flattened window (k rows of width r', step-major); `targets` holds the
/// first `n_latent` entries of the following row.
struct Windows {
  std::size_t k = 0;
  std::size_t width = 0;
  DenseMatrix inputs;   ///< n_windows x (k * width)
  DenseMatrix targets;  ///< n_windows x n_latent
  std::vector<std::size_t> trajectory;
  std::vector<std::size_t> target_step;  ///< row index of the target inside its trajectory

  std::size_t size() const noexcept { return inputs.rows(); }
  /// Step t of the windows in `rows`, as a |rows| x width matrix.
  DenseMatrix step(const std::vector<std::size_t>& rows, std::size_t t) const;
};

/// Windows never cross trajectory boundaries. Throws DomainError when a
/// trajectory has k rows or fewer, or n_latent exceeds the width.
Windows build_windows(const std::vector<DenseMatrix>& series, std::size_t k, std::size_t n_latent);

/// One-step-ahead MSE on the windows; the report's errors are per-entry MSE
/// on `train` and `test` (test may be empty).
TrainReport train_lstm(LstmNet& net, const Windows& train, const Windows& test, const TrainConfig& config);

/// Autoregressive prediction from a k x r' seed window. Each prediction re-runs
/// the current window from a zero state; `params` is appended to every
/// predicted latent before it enters the window. Returns n_steps x n_latent.
DenseMatrix rollout(const LstmNet& net, const DenseMatrix& seed_window, std::size_t n_steps,
                    std::span<const double> params);

}  // namespace hrom
