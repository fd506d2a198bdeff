#pragma once

#include <array>
#include <cstddef>

#include "hrom/neural/param_store.hpp"

namespace hrom {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Learning rate per ParamGroup, indexed by the enum value.
  std::array<double, 3> lr{1e-4, 1e-5, 3e-4};

  double group_lr(ParamGroup g) const noexcept { return lr[static_cast<std::size_t>(g)]; }
  void set_group_lr(ParamGroup g, double value) noexcept { lr[static_cast<std::size_t>(g)] = value; }
};

/// Adam with bias-corrected moments and one learning rate per parameter group.
class Adam {
 public:
  Adam(const ParamStore& store, AdamConfig config);

  /// One update from the gradients currently in `store`. Every group rate is
  /// multiplied by `lr_multiplier` (used by the learning-rate schedule).
  /// Throws OptimizationError naming the tensor if a gradient is not finite.
  void step(ParamStore& store, double lr_multiplier = 1.0);

  std::size_t steps() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }
  const DenseMatrix& first_moment(std::size_t slot) const { return m_.at(slot); }
  const DenseMatrix& second_moment(std::size_t slot) const { return v_.at(slot); }

 private:
  AdamConfig config_;
  std::vector<DenseMatrix> m_;
  std::vector<DenseMatrix> v_;
  std::size_t t_ = 0;
};

/// Learning-rate multiplier per optimizer step.
///
/// Cyclic is the triangular policy: the multiplier rises linearly from
/// `low_fraction` to 1 over the first half of each `period` and falls back over
/// the second half. The trainer reads period 0 as one cycle over the whole run.
struct LrSchedule {
  enum class Kind { Constant, Cyclic };
  Kind kind = Kind::Constant;
  double low_fraction = 0.1;
  std::size_t period = 2000;

  double multiplier(std::size_t step) const;
};

}  // namespace hrom
