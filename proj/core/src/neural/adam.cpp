#include "hrom/neural/adam.hpp"

#include <cmath>
#include <string>

#include "hrom/errors.hpp"

namespace hrom {

Adam::Adam(const ParamStore& store, AdamConfig config) : config_(config) {
  if (!(config_.beta1 >= 0.0 && config_.beta1 < 1.0) || !(config_.beta2 >= 0.0 && config_.beta2 < 1.0))
    throw ConfigError("Adam: betas must lie in [0, 1)");
  if (!(config_.epsilon > 0.0)) throw ConfigError("Adam: epsilon must be positive");
  for (double lr : config_.lr)
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("Adam: learning rates must be finite and >= 0");
  for (const Tensor& t : store) {
    m_.emplace_back(t.value.rows(), t.value.cols());
    v_.emplace_back(t.value.rows(), t.value.cols());
  }
}

void Adam::step(ParamStore& store, double lr_multiplier) {
  if (store.size() != m_.size()) throw StateError("Adam: parameter store changed since construction");
  for (const Tensor& t : store)
    if (!t.grad.all_finite()) throw OptimizationError("Adam: non-finite gradient in tensor '" + t.name + "'");

  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t s = 0; s < store.size(); ++s) {
    Tensor& t = store[s];
    const double lr = config_.group_lr(t.group) * lr_multiplier;
    double* w = t.value.data();
    const double* g = t.grad.data();
    double* m = m_[s].data();
    double* v = v_[s].data();
    for (std::size_t i = 0; i < t.value.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      w[i] -= lr * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

double LrSchedule::multiplier(std::size_t step) const {
  if (kind == Kind::Constant) return 1.0;
  if (period < 2) return 1.0;
  const double p = static_cast<double>(step % period) / static_cast<double>(period);
  const double tri = 1.0 - std::abs(2.0 * p - 1.0);
  return low_fraction + (1.0 - low_fraction) * tri;
}

}  // namespace hrom
