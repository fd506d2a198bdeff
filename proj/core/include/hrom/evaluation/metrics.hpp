#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hrom/data/dataset.hpp"
#include "hrom/numerics/dense_matrix.hpp"
#include "hrom/numerics/random.hpp"
#include "hrom/rom/hybrid_autoencoder.hpp"

namespace hrom {

/// Mean squared reconstruction error per entry, (1/(M F)) sum ||x_i - xhat_i||^2,
/// in the units of x. Throws DomainError for an empty set.
double l2_error(const DenseMatrix& x, const DenseMatrix& xhat);
double l2_error(const HybridAutoencoder& model, const DenseMatrix& x);
/// Error of reconstructing `targets` from `inputs` (noisy inputs, clean targets).
double l2_error(const HybridAutoencoder& model, const DenseMatrix& inputs, const DenseMatrix& targets);

struct SharpnessConfig {
  double rho = 0.1;
  std::size_t n_directions = 32;
  std::size_t n_ascent_steps = 5;
  std::uint64_t seed = 0;
  /// Evaluate on at most this many rows of the data (0 = all), taken from the top.
  std::size_t max_samples = 0;
  void validate() const;
};

struct SharpnessResult {
  double value = 0.0;       ///< max over directions of the loss increase
  double dispersion = 0.0;  ///< std over the per-direction maxima
  double base_loss = 0.0;
  std::vector<double> per_direction;
  std::size_t n_nonfinite = 0;  ///< directions whose perturbed loss was not finite (counted as +inf)
};

/// Loss at the current parameters; when `with_grad` is set the gradient is
/// also written into the ParamStore grads (zeroed first by the callee).
using LossWithGradient = std::function<double(bool with_grad)>;

/// max_{||delta|| <= rho} L(theta + delta) - L(theta) over every tensor of
/// `params`, approximated by random directions of length rho, each refined by
/// n_ascent_steps normalized-gradient steps of length rho projected back onto
/// the ball. Direction i draws from RandomStream(derive_seed(seed, i)).
/// The parameters are restored bit for bit.
SharpnessResult estimate_sharpness(ParamStore& params, const LossWithGradient& loss, const SharpnessConfig& config);

/// Sharpness of the per-entry reconstruction error on `data` over the
/// trainable parameters (the POD basis is not perturbed).
SharpnessResult estimate_sharpness(HybridAutoencoder& model, const DenseMatrix& data, const SharpnessConfig& config);

struct NoiseLevelResult {
  double level = 0.0;
  double error = 0.0;
};

/// For each level: noise of std level * amplitude is added to the raw clean
/// rows, the noisy rows are standardized with the model's statistics, and the
/// error is measured against the standardized clean rows. Level i draws from
/// stream.child(i).
std::vector<NoiseLevelResult> noise_robustness_sweep(const HybridAutoencoder& model, const DenseMatrix& clean_raw,
                                                     const std::vector<double>& levels, double amplitude,
                                                     const RandomStream& stream);

struct ConvergenceFit {
  double q = 0.0;          ///< error ~ C r^-q
  double intercept = 0.0;  ///< log C
};

/// Least-squares fit of log(error) against log(rank). Needs at least three
/// pairs with positive errors and two distinct ranks, else DomainError.
ConvergenceFit fit_convergence_rate(const std::vector<double>& ranks, const std::vector<double>& errors);

struct ContributionSplit {
  double latent_pod = 0.0;
  double latent_nn = 0.0;
  double reconstruction_pod = 0.0;
  double reconstruction_nn = 0.0;
  std::size_t zero_denominator = 0;  ///< samples counted as all-POD because both norms were 0
  std::string convention = "norm_ratio";
};

/// Mean over rows of ||(1-a) phi_POD|| / (||(1-a) phi_POD|| + ||a phi_NN||) and
/// the same with psi and b on the blended latent. Learnable weighted models only.
ContributionSplit contribution_split(const HybridAutoencoder& model, const DenseMatrix& x);

struct SimilarityPair {
  std::size_t first = 0;
  std::size_t second = 0;
  double score = 0.0;
  std::size_t skipped = 0;
};

struct SimilaritySummary {
  std::vector<SimilarityPair> pairs;
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Per pair of latent sets (same samples, same rank): mean over samples of the
/// absolute cosine between the two latent vectors. Samples where either
/// vector is zero are skipped and counted.
SimilaritySummary latent_cosine_similarity(const std::vector<DenseMatrix>& latents);

struct MetricReport {
  std::string metric;
  std::string variant;
  std::size_t grid = 0;
  std::size_t rank = 0;
  std::uint64_t seed = 0;
  double noise_level = 0.0;
  double value = 0.0;
  double dispersion = 0.0;
};

/// Columns: metric,variant,grid,rank,seed,noise_level,value,dispersion,config_hash.
void write_metric_csv(std::ostream& out, const std::vector<MetricReport>& rows, const std::string& config_hash);

}  // namespace hrom
