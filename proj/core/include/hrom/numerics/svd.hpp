#pragma once

#include <cstddef>
#include <vector>

#include "hrom/numerics/dense_matrix.hpp"

namespace hrom {

struct SVDResult {
  DenseMatrix U;          ///< m x k, orthonormal columns
  std::vector<double> S;  ///< k singular values, descending, non-negative
  DenseMatrix Vt;         ///< k x n, orthonormal rows
};

/// Leading k singular triplets of A.
///
/// Householder bidiagonalization followed by implicit-shift QR on the
/// bidiagonal (Golub-Kahan-Reinsch). Fully deterministic. Each column of U is
/// signed so that its largest-magnitude entry is positive, and the matching
/// row of Vt is flipped with it.
///
/// Throws DomainError unless 1 <= k <= min(rows, cols) and ValidationError on
/// non-finite input.
SVDResult thin_svd(const DenseMatrix& a, std::size_t k);

}  // namespace hrom
