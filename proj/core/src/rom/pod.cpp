#include "hrom/rom/pod.hpp"

#include <algorithm>
#include <string>

#include "hrom/errors.hpp"

namespace hrom {

DenseMatrix PodBasis::encode(const DenseMatrix& x) const {
  if (x.cols() != n_features())
    throw ValidationError("pod encode: expected " + std::to_string(n_features()) + " features, got " +
                          std::to_string(x.cols()));
  return matmul(x, ur);
}

DenseMatrix PodBasis::decode(const DenseMatrix& z) const {
  if (z.cols() != rank())
    throw ValidationError("pod decode: expected latent size " + std::to_string(rank()) + ", got " +
                          std::to_string(z.cols()));
  return matmul_nt(z, ur);
}

double PodBasis::tail_energy() const {
  double tail = 0.0;
  for (std::size_t i = rank(); i < singular_values.size(); ++i) tail += singular_values[i] * singular_values[i];
  return tail;
}

PodSpectrum pod_spectrum(const DenseMatrix& train) {
  if (train.rows() == 0 || train.cols() == 0) throw DomainError("pod: empty training matrix");
  const std::size_t k = std::min(train.rows(), train.cols());
  SVDResult svd = thin_svd(train.transpose(), k);
  return {std::move(svd.U), std::move(svd.S)};
}

PodBasis pod_from_spectrum(const PodSpectrum& spectrum, std::size_t r, const Standardization& stats) {
  if (r == 0 || r > spectrum.modes.cols())
    throw DomainError("pod: rank " + std::to_string(r) + " outside [1, " + std::to_string(spectrum.modes.cols()) + "]");
  PodBasis pod;
  pod.ur = spectrum.modes.block_cols(0, r);
  pod.singular_values = spectrum.singular_values;
  pod.stats = stats;
  return pod;
}

PodBasis compute_pod(const DenseMatrix& train, std::size_t r, const Standardization& stats) {
  if (r == 0 || r > std::min(train.rows(), train.cols()))
    throw DomainError("pod: rank " + std::to_string(r) + " outside [1, min(M, F)]");
  return pod_from_spectrum(pod_spectrum(train), r, stats);
}

PodBasis compute_pod(const SnapshotMatrix& snapshots, std::size_t r) {
  return compute_pod(snapshots.train(), r, snapshots.stats);
}

}  // namespace hrom
