#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hrom/neural/param_store.hpp"

namespace hrom {

struct GradientCheckOptions {
  double h = 1e-6;
  double tolerance = 1e-4;
  /// Denominator floor for the relative error, so entries whose true
  /// derivative is ~0 are judged by absolute error instead. The floor is also
  /// raised to (rounding error of the central difference) / tolerance.
  double abs_floor = 1e-7;
  /// 0 checks every entry; otherwise a seeded random subset of this size per tensor.
  std::size_t max_entries_per_tensor = 0;
  std::uint64_t seed = 0;
  /// Restrict the check to these tensor names (empty = all).
  std::vector<std::string> only;
};

struct TensorGradientCheck {
  std::string name;
  std::size_t entries_checked = 0;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  bool flagged = false;
};

struct GradientCheckReport {
  std::vector<TensorGradientCheck> tensors;
  double max_rel_error = 0.0;
  bool passed = true;

  const TensorGradientCheck& at(const std::string& name) const;
};

/// Compares the gradients already stored in `params` against central
/// differences of `loss`. `loss` must evaluate the objective at the current
/// parameter values; each perturbed entry is restored bitwise afterwards.
GradientCheckReport gradient_check(const std::function<double()>& loss, ParamStore& params,
                                   const GradientCheckOptions& options = {});

}  // namespace hrom
