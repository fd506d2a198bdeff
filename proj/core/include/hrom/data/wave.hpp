#pragma once

#include <cstddef>

#include "hrom/numerics/dense_matrix.hpp"

namespace hrom {

/// Gaussian bump N(x | mu(t), variance) with mu(t) = 100 (sin(omega t) + 1) + 28
/// sampled at x = 0..nx-1 and integer t = 0..n_steps-1.
struct WaveConfig {
  std::size_t nx = 256;
  std::size_t n_steps = 100000;
  double variance = 10.0;
  double omega = 0.01;

  void validate() const;
};

double wave_center(const WaveConfig& config, double t);
DenseMatrix traveling_wave(const WaveConfig& config);

}  // namespace hrom
