#pragma once

#include <cstddef>
#include <vector>

#include "hrom/numerics/dense_matrix.hpp"

namespace hrom {

/// Viscous Burgers u_t + u u_x = nu u_xx with nu = 1/Re on [0, length].
struct BurgersConfig {
  double re = 100.0;
  std::size_t nx = 128;
  std::size_t nt = 100;
  double terminal_time = 2.0;
  double length = 1.0;

  void validate() const;
};

/// Closed-form solution
///   u = (x/(t+1)) / (1 + sqrt((t+1)/t0) exp(Re x^2 / (4(t+1)))),  t0 = exp(Re/8).
/// Evaluated in log space so large Re does not overflow.
double burgers_solution(double re, double x, double t);

/// Grid x_j = j L/(nx-1) and times t_i = i T/(nt-1).
std::vector<double> burgers_grid(const BurgersConfig& config);
std::vector<double> burgers_times(const BurgersConfig& config);

/// nt x nx trajectory for one Reynolds number.
DenseMatrix burgers_trajectory(const BurgersConfig& config);

/// Re = 100, 200, ..., 1900 (19 values).
std::vector<double> burgers_train_reynolds();
/// Re = 50, 250, ..., 2450 (13 values), disjoint from the train set.
std::vector<double> burgers_test_reynolds();

}  // namespace hrom
