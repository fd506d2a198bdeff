#include "hrom/data/ks.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hrom/errors.hpp"

namespace hrom {

double KsConfig::domain_length() const { return length > 0.0 ? length : 64.0 * std::numbers::pi; }

void KsConfig::validate() const {
  if (!is_power_of_two(n) || n < 8) throw ConfigError("ks: n must be a power of two >= 8");
  if (!(dt > 0.0)) throw ConfigError("ks: dt must be positive");
  if (n_steps == 0) throw ConfigError("ks: n_steps must be positive");
  if (save_every == 0) throw ConfigError("ks: save_every must be positive");
  if (max_wavenumber < 1) throw ConfigError("ks: max_wavenumber must be >= 1");
  if (length < 0.0) throw ConfigError("ks: length must be positive");
}

KsModes draw_ks_modes(const KsConfig& config, RandomStream& stream) {
  KsModes m;
  for (std::size_t k = 0; k < config.n_modes; ++k) {
    m.amplitude.push_back(stream.uniform(-1.0, 1.0));
    m.phase.push_back(stream.uniform(0.0, 2.0 * std::numbers::pi));
    m.wavenumber.push_back(static_cast<int>(stream.uniform_int(1, config.max_wavenumber)));
  }
  return m;
}

std::vector<double> ks_initial_condition(const KsConfig& config, const KsModes& modes) {
  const double L = config.domain_length();
  std::vector<double> u(config.n, 0.0);
  for (std::size_t j = 0; j < config.n; ++j) {
    const double x = L * static_cast<double>(j) / static_cast<double>(config.n);
    double v = 0.0;
    for (std::size_t k = 0; k < modes.amplitude.size(); ++k) {
      const double arg = 2.0 * std::numbers::pi * modes.wavenumber[k] * x / L + modes.phase[k];
      v += modes.amplitude[k] * (std::sin(arg) + std::cos(arg));
    }
    u[j] = v;
  }
  return u;
}

std::vector<double> ks_initial_condition(const KsConfig& config, RandomStream& stream) {
  return ks_initial_condition(config, draw_ks_modes(config, stream));
}

KsSolver::KsSolver(std::size_t n, double length, double dt)
    : n_(n), dt_(dt), plan_(n), q_(n), linear_(n), dealias_(n), uhat_(n), nl_prev_(n), work_(n) {
  if (!(dt > 0.0) || !(length > 0.0)) throw ConfigError("KsSolver: dt and length must be positive");
  for (std::size_t j = 0; j < n; ++j) {
    const long k = (j <= n / 2) ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
    const double q = 2.0 * std::numbers::pi * static_cast<double>(k) / length;
    linear_[j] = q * q - q * q * q * q;
    q_[j] = (j == n / 2) ? 0.0 : q;
    dealias_[j] = (3 * static_cast<std::size_t>(std::labs(k)) < n) ? 1.0 : 0.0;
  }
}

void KsSolver::set_state(const std::vector<double>& u) {
  if (u.size() != n_) throw ValidationError("KsSolver: state has wrong length");
  for (std::size_t j = 0; j < n_; ++j) uhat_[j] = u[j];
  plan_.forward(uhat_);
  enforce_real();
  steps_ = 0;
}

void KsSolver::nonlinear(const std::vector<std::complex<double>>& uhat, std::vector<std::complex<double>>& out) {
  for (std::size_t j = 0; j < n_; ++j) work_[j] = uhat[j];
  plan_.inverse(work_);
  for (auto& v : work_) v = v.real() * v.real();
  plan_.forward(work_);
  const std::complex<double> minus_half_i(0.0, -0.5);
  for (std::size_t j = 0; j < n_; ++j) out[j] = minus_half_i * q_[j] * dealias_[j] * work_[j];
}

void KsSolver::step() {
  std::vector<std::complex<double>> nl(n_);
  nonlinear(uhat_, nl);
  for (std::size_t j = 0; j < n_; ++j) {
    const double hl = 0.5 * dt_ * linear_[j];
    const std::complex<double> explicit_part =
        steps_ == 0 ? dt_ * nl[j] : dt_ * (1.5 * nl[j] - 0.5 * nl_prev_[j]);
    uhat_[j] = ((1.0 + hl) * uhat_[j] + explicit_part) / (1.0 - hl);
  }
  nl_prev_.swap(nl);
  ++steps_;
  enforce_real();

  std::vector<double> u = state();
  for (double v : u) {
    if (!(std::abs(v) <= 1e6))
      throw SimulationError("ks: solution blew up at step " + std::to_string(steps_) + " (max|u| > 1e6)");
  }
}

// The imaginary part of u only sees the linear operator, so roundoff in it
// grows at the KS instability rate unless it is projected out every step.
void KsSolver::enforce_real() {
  uhat_[0] = uhat_[0].real();
  uhat_[n_ / 2] = uhat_[n_ / 2].real();
  for (std::size_t j = 1; j < n_ / 2; ++j) {
    const std::complex<double> avg = 0.5 * (uhat_[j] + std::conj(uhat_[n_ - j]));
    uhat_[j] = avg;
    uhat_[n_ - j] = std::conj(avg);
  }
}

std::vector<double> KsSolver::state() const {
  std::vector<std::complex<double>> tmp = uhat_;
  plan_.inverse(tmp);
  std::vector<double> u(n_);
  for (std::size_t j = 0; j < n_; ++j) u[j] = tmp[j].real();
  return u;
}

KsTrajectory simulate_ks(const KsConfig& config, RandomStream& stream) {
  config.validate();
  KsTrajectory out;
  out.modes = draw_ks_modes(config, stream);
  KsSolver solver(config.n, config.domain_length(), config.dt);
  solver.set_state(ks_initial_condition(config, out.modes));
  for (std::size_t s = 0; s < config.transient_skip; ++s) solver.step();
  out.snapshots = DenseMatrix(config.n_steps, config.n);
  for (std::size_t i = 0; i < config.n_steps; ++i) {
    if (i > 0)
      for (std::size_t s = 0; s < config.save_every; ++s) solver.step();
    const std::vector<double> u = solver.state();
    std::copy(u.begin(), u.end(), out.snapshots.row(i).begin());
    out.time.push_back(solver.time());
  }
  return out;
}

KsTrajectory simulate_ks(const KsConfig& config) {
  RandomStream stream(config.seed);
  return simulate_ks(config, stream);
}

}  // namespace hrom
