#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "hrom/numerics/dense_matrix.hpp"
#include "hrom/numerics/fft.hpp"
#include "hrom/numerics/random.hpp"

namespace hrom {

/// u_t + u u_x + u_xx + u_xxxx = 0 on a periodic domain [0, length).
struct KsConfig {
  double length = 0.0;  ///< 0 selects the default 64*pi
  std::size_t n = 512;
  double dt = 0.01;
  /// Stored snapshots, one per `save_every` solver steps after the transient.
  std::size_t n_steps = 2000;
  /// Solver steps discarded before the first stored snapshot.
  std::size_t transient_skip = 10000;
  std::size_t save_every = 25;
  std::size_t n_modes = 10;
  int max_wavenumber = 6;
  std::uint64_t seed = 1;

  double domain_length() const;
  void validate() const;
};

/// Random Fourier content of the initial condition.
struct KsModes {
  std::vector<double> amplitude;
  std::vector<double> phase;
  std::vector<int> wavenumber;
};

KsModes draw_ks_modes(const KsConfig& config, RandomStream& stream);

/// u(x,0) = sum_k A_k [sin(2 pi n_k x / L + phi_k) + cos(2 pi n_k x / L + phi_k)] on x_j = j L / n.
std::vector<double> ks_initial_condition(const KsConfig& config, const KsModes& modes);
std::vector<double> ks_initial_condition(const KsConfig& config, RandomStream& stream);

/// Fourier pseudospectral KS integrator, Crank-Nicolson on the linear part
/// and Adams-Bashforth 2 on -0.5 (u^2)_x (forward Euler on the first step),
/// with 2/3-rule dealiasing of the nonlinear term.
class KsSolver {
 public:
  KsSolver(std::size_t n, double length, double dt);

  void set_state(const std::vector<double>& u);
  /// Advances one step. Throws SimulationError once max|u| exceeds 1e6.
  void step();

  std::vector<double> state() const;
  std::size_t steps_taken() const noexcept { return steps_; }
  double time() const noexcept { return static_cast<double>(steps_) * dt_; }

 private:
  void enforce_real();
  void nonlinear(const std::vector<std::complex<double>>& uhat, std::vector<std::complex<double>>& out);

  std::size_t n_;
  double dt_;
  FftPlan plan_;
  std::vector<double> q_;          // angular wavenumbers, 0 at Nyquist
  std::vector<double> linear_;     // q^2 - q^4
  std::vector<double> dealias_;    // 1 inside the 2/3 band, 0 outside
  std::vector<std::complex<double>> uhat_;
  std::vector<std::complex<double>> nl_prev_;
  std::vector<std::complex<double>> work_;
  std::size_t steps_ = 0;
};

struct KsTrajectory {
  DenseMatrix snapshots;     ///< n_steps x n
  std::vector<double> time;  ///< solver time of each stored snapshot
  KsModes modes;
};

KsTrajectory simulate_ks(const KsConfig& config, RandomStream& stream);
KsTrajectory simulate_ks(const KsConfig& config);

}  // namespace hrom
