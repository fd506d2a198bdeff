#include "hrom/data/wave.hpp"

#include <cmath>
#include <numbers>

#include "hrom/errors.hpp"

namespace hrom {

void WaveConfig::validate() const {
  if (nx == 0 || n_steps == 0) throw ConfigError("wave: nx and n_steps must be positive");
  if (!(variance > 0.0)) throw ConfigError("wave: variance must be positive");
}

double wave_center(const WaveConfig& config, double t) { return 100.0 * (std::sin(config.omega * t) + 1.0) + 28.0; }

DenseMatrix traveling_wave(const WaveConfig& config) {
  config.validate();
  DenseMatrix u(config.n_steps, config.nx);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * config.variance);
  for (std::size_t i = 0; i < config.n_steps; ++i) {
    const double mu = wave_center(config, static_cast<double>(i));
    double* row = u.row(i).data();
    for (std::size_t j = 0; j < config.nx; ++j) {
      const double d = static_cast<double>(j) - mu;
      row[j] = norm * std::exp(-d * d / (2.0 * config.variance));
    }
  }
  return u;
}

}  // namespace hrom
