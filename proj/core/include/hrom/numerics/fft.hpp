#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hrom {

/// Iterative radix-2 complex FFT with a precomputed twiddle table.
class FftPlan {
 public:
  /// n must be a power of two.
  explicit FftPlan(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  /// X_k = sum_j x_j exp(-2 pi i j k / n), in place.
  void forward(std::span<std::complex<double>> data) const;
  /// Inverse transform including the 1/n factor, in place.
  void inverse(std::span<std::complex<double>> data) const;

 private:
  void transform(std::span<std::complex<double>> data, bool inverse) const;

  std::size_t n_;
  std::vector<std::size_t> bit_reverse_;
  std::vector<std::complex<double>> twiddles_;
};

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;

}  // namespace hrom
