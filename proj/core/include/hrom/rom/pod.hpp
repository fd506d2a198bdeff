#pragma once

#include <cstddef>
#include <vector>

#include "hrom/data/dataset.hpp"
#include "hrom/numerics/dense_matrix.hpp"
#include "hrom/numerics/svd.hpp"

namespace hrom {

/// Truncated POD basis. Snapshots are rows, so encode is x Ur and decode z Ur^T.
struct PodBasis {
  DenseMatrix ur;                       ///< F x r, orthonormal columns
  std::vector<double> singular_values;  ///< all singular values of the training matrix
  Standardization stats;                ///< map from raw units to the space ur lives in

  std::size_t rank() const noexcept { return ur.cols(); }
  std::size_t n_features() const noexcept { return ur.rows(); }

  DenseMatrix encode(const DenseMatrix& x) const;
  DenseMatrix decode(const DenseMatrix& z) const;
  DenseMatrix reconstruct(const DenseMatrix& x) const { return decode(encode(x)); }

  /// sum_{i >= r} sigma_i^2 of the training matrix.
  double tail_energy() const;
};

/// Full singular spectrum of the (already standardized) training rows; left
/// singular vectors of train^T. Reuse it for several ranks via pod_from_spectrum.
struct PodSpectrum {
  DenseMatrix modes;  ///< F x min(M, F)
  std::vector<double> singular_values;
};

PodSpectrum pod_spectrum(const DenseMatrix& train);
PodBasis pod_from_spectrum(const PodSpectrum& spectrum, std::size_t r, const Standardization& stats);

/// Throws DomainError when r is 0 or exceeds min(M, F).
PodBasis compute_pod(const DenseMatrix& train, std::size_t r, const Standardization& stats);
PodBasis compute_pod(const SnapshotMatrix& snapshots, std::size_t r);

}  // namespace hrom
