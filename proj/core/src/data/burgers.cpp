#include "hrom/data/burgers.hpp"

#include <cmath>

#include "hrom/errors.hpp"

namespace hrom {

void BurgersConfig::validate() const {
  if (!(re > 0.0)) throw ConfigError("burgers: Re must be positive");
  if (nx < 2 || nt < 2) throw ConfigError("burgers: nx and nt must be >= 2");
  if (!(terminal_time > 0.0) || !(length > 0.0)) throw ConfigError("burgers: T and L must be positive");
}

double burgers_solution(double re, double x, double t) {
  // sqrt((t+1)/t0) exp(Re x^2/(4(t+1))) = exp(0.5 log(t+1) - Re/16 + Re x^2/(4(t+1)))
  const double expo = 0.5 * std::log(t + 1.0) - re / 16.0 + re * x * x / (4.0 * (t + 1.0));
  const double denom = 1.0 + std::exp(expo);
  return (x / (t + 1.0)) / denom;
}

std::vector<double> burgers_grid(const BurgersConfig& config) {
  std::vector<double> x(config.nx);
  for (std::size_t j = 0; j < config.nx; ++j)
    x[j] = config.length * static_cast<double>(j) / static_cast<double>(config.nx - 1);
  return x;
}

std::vector<double> burgers_times(const BurgersConfig& config) {
  std::vector<double> t(config.nt);
  for (std::size_t i = 0; i < config.nt; ++i)
    t[i] = config.terminal_time * static_cast<double>(i) / static_cast<double>(config.nt - 1);
  return t;
}

DenseMatrix burgers_trajectory(const BurgersConfig& config) {
  config.validate();
  const auto x = burgers_grid(config);
  const auto t = burgers_times(config);
  DenseMatrix u(config.nt, config.nx);
  for (std::size_t i = 0; i < config.nt; ++i)
    for (std::size_t j = 0; j < config.nx; ++j) u(i, j) = burgers_solution(config.re, x[j], t[i]);
  return u;
}

std::vector<double> burgers_train_reynolds() {
  std::vector<double> re;
  for (int v = 100; v <= 1900; v += 100) re.push_back(v);
  return re;
}

std::vector<double> burgers_test_reynolds() {
  std::vector<double> re;
  for (int v = 50; v <= 2450; v += 200) re.push_back(v);
  return re;
}

}  // namespace hrom
