#include "hrom/evaluation/metrics.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "hrom/errors.hpp"
#include "hrom/util/csv.hpp"

namespace hrom {

double l2_error(const DenseMatrix& x, const DenseMatrix& xhat) {
  require_same_shape(x, xhat, "l2_error");
  if (x.size() == 0) throw DomainError("l2_error: empty snapshot set");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x.data()[i] - xhat.data()[i];
    sum += d * d;
  }
  return sum / static_cast<double>(x.size());
}

double l2_error(const HybridAutoencoder& model, const DenseMatrix& x) { return l2_error(x, model.reconstruct(x)); }

double l2_error(const HybridAutoencoder& model, const DenseMatrix& inputs, const DenseMatrix& targets) {
  return l2_error(targets, model.reconstruct(inputs));
}

void SharpnessConfig::validate() const {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("sharpness.rho must be finite and >= 0");
  if (n_directions == 0) throw ConfigError("sharpness.n_directions must be positive");
}

namespace {

double norm_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void set_perturbed(ParamStore& params, const std::vector<double>& base, const std::vector<double>& delta) {
  std::vector<double> v(base.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = base[i] + delta[i];
  params.assign_flat_values(v);
}

}  // namespace

SharpnessResult estimate_sharpness(ParamStore& params, const LossWithGradient& loss, const SharpnessConfig& config) {
  config.validate();
  const std::vector<double> base = params.flat_values();
  SharpnessResult result;
  result.base_loss = loss(false);
  if (!std::isfinite(result.base_loss)) throw OptimizationError("sharpness: loss at the unperturbed point is not finite");
  const double inf = std::numeric_limits<double>::infinity();

  for (std::size_t d = 0; d < config.n_directions; ++d) {
    double best = 0.0;
    if (config.rho > 0.0 && !base.empty()) {
      RandomStream rs(RandomStream::derive_seed(config.seed, d));
      std::vector<double> delta(base.size());
      for (double& v : delta) v = rs.normal();
      double n = norm_of(delta);
      for (double& v : delta) v *= config.rho / n;
      try {
        set_perturbed(params, base, delta);
        double l = loss(config.n_ascent_steps > 0);
        if (!std::isfinite(l)) throw OptimizationError("non-finite perturbed loss");
        best = l - result.base_loss;
        for (std::size_t s = 0; s < config.n_ascent_steps; ++s) {
          const std::vector<double> g = params.flat_grads();
          const double gn = norm_of(g);
          if (!(gn > 0.0) || !std::isfinite(gn)) break;
          for (std::size_t i = 0; i < delta.size(); ++i) delta[i] += config.rho * g[i] / gn;
          n = norm_of(delta);
          if (n > config.rho)
            for (double& v : delta) v *= config.rho / n;
          set_perturbed(params, base, delta);
          l = loss(s + 1 < config.n_ascent_steps);
          if (!std::isfinite(l)) throw OptimizationError("non-finite perturbed loss");
          best = std::max(best, l - result.base_loss);
        }
      } catch (const OptimizationError&) {
        best = inf;
        ++result.n_nonfinite;
      }
    }
    result.per_direction.push_back(best);
  }
  params.assign_flat_values(base);
  params.zero_grads();

  result.value = 0.0;
  for (double v : result.per_direction) result.value = std::max(result.value, v);
  if (result.n_nonfinite > 0) {
    result.dispersion = std::nan("");
  } else {
    double mean = 0.0;
    for (double v : result.per_direction) mean += v;
    mean /= static_cast<double>(result.per_direction.size());
    double var = 0.0;
    for (double v : result.per_direction) var += (v - mean) * (v - mean);
    result.dispersion = std::sqrt(var / static_cast<double>(result.per_direction.size()));
  }
  return result;
}

SharpnessResult estimate_sharpness(HybridAutoencoder& model, const DenseMatrix& data, const SharpnessConfig& config) {
  DenseMatrix x = data;
  if (config.max_samples > 0 && data.rows() > config.max_samples) {
    std::vector<std::size_t> rows(config.max_samples);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    x = data.gather_rows(rows);
  }
  if (x.rows() == 0) throw DomainError("sharpness: empty data");
  const double scale = 1.0 / static_cast<double>(model.n_features());
  auto loss = [&](bool with_grad) {
    if (!with_grad) return l2_error(model, x);
    Tape tape;
    Tape::Var in = tape.input(x);
    Tape::Var l = tape.mse(model.reconstruct(tape, in), in);
    const double value = tape.value(l)(0, 0);
    if (!std::isfinite(value)) return value;
    model.params().zero_grads();
    tape.backward(l, model.params());
    return value * scale;
  };
  return estimate_sharpness(model.params(), loss, config);
}

std::vector<NoiseLevelResult> noise_robustness_sweep(const HybridAutoencoder& model, const DenseMatrix& clean_raw,
                                                     const std::vector<double>& levels, double amplitude,
                                                     const RandomStream& stream) {
  const DenseMatrix target = model.stats().apply(clean_raw);
  std::vector<NoiseLevelResult> out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 0.0)) throw ConfigError("noise levels must be >= 0");
    RandomStream rs = stream.child(i);
    const DenseMatrix noisy = model.stats().apply(add_noise(clean_raw, levels[i], amplitude, rs));
    out.push_back({levels[i], l2_error(model, noisy, target)});
  }
  return out;
}

ConvergenceFit fit_convergence_rate(const std::vector<double>& ranks, const std::vector<double>& errors) {
  if (ranks.size() != errors.size()) throw ValidationError("fit_convergence_rate: ranks and errors differ in length");
  if (ranks.size() < 3) throw DomainError("fit_convergence_rate: need at least three points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i]))
      throw DomainError("fit_convergence_rate: errors must be positive and finite");
    if (!(ranks[i] > 0.0)) throw DomainError("fit_convergence_rate: ranks must be positive");
    lx.push_back(std::log(ranks[i]));
    ly.push_back(std::log(errors[i]));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_convergence_rate: need at least two distinct ranks");
  const double slope = sxy / sxx;
  return {-slope, my - slope * mx};
}

namespace {

double row_norm(const DenseMatrix& m, std::size_t i) {
  double s = 0.0;
  for (double v : m.row(i)) s += v * v;
  return std::sqrt(s);
}

DenseMatrix scale_cols(const DenseMatrix& m, const DenseMatrix& w, bool complement, std::size_t period) {
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double wj = w.data()[j % period];
      out(i, j) = m(i, j) * (complement ? 1.0 - wj : wj);
    }
  return out;
}

}  // namespace

ContributionSplit contribution_split(const HybridAutoencoder& model, const DenseMatrix& x) {
  if (model.variant() != Variant::LearnableWeightedHybrid || !model.a_slot())
    throw ValidationError("contribution_split: needs a learnable weighted hybrid with an encoder");
  if (x.rows() == 0) throw DomainError("contribution_split: no samples");
  const DenseMatrix& a = model.params()[*model.a_slot()].value;
  const DenseMatrix& b = model.params()[*model.b_slot()].value;
  ContributionSplit out;

  auto share = [&](const DenseMatrix& pod, const DenseMatrix& nn, double& pod_share) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pod.rows(); ++i) {
      const double p = row_norm(pod, i), q = row_norm(nn, i);
      if (p + q == 0.0) {
        ++out.zero_denominator;
        sum += 1.0;
      } else {
        sum += p / (p + q);
      }
    }
    pod_share = sum / static_cast<double>(pod.rows());
  };

  BlendParts enc = model.encode_parts(x);
  share(scale_cols(enc.pod, a, true, a.cols()), scale_cols(enc.nn, a, false, a.cols()), out.latent_pod);
  BlendParts dec = model.decode_parts(model.encode(x));
  share(scale_cols(dec.pod, b, true, b.cols()), scale_cols(dec.nn, b, false, b.cols()), out.reconstruction_pod);
  out.latent_nn = 1.0 - out.latent_pod;
  out.reconstruction_nn = 1.0 - out.reconstruction_pod;
  return out;
}

SimilaritySummary latent_cosine_similarity(const std::vector<DenseMatrix>& latents) {
  if (latents.size() < 2) throw DomainError("latent_cosine_similarity: need at least two latent sets");
  for (const DenseMatrix& z : latents) require_same_shape(latents.front(), z, "latent_cosine_similarity");
  SimilaritySummary s;
  std::vector<double> scores;
  for (std::size_t p = 0; p < latents.size(); ++p)
    for (std::size_t q = p + 1; q < latents.size(); ++q) {
      SimilarityPair pair{p, q, 0.0, 0};
      double sum = 0.0;
      std::size_t used = 0;
      for (std::size_t i = 0; i < latents[p].rows(); ++i) {
        const double np = row_norm(latents[p], i), nq = row_norm(latents[q], i);
        if (np == 0.0 || nq == 0.0) {
          ++pair.skipped;
          continue;
        }
        double dot = 0.0;
        for (std::size_t j = 0; j < latents[p].cols(); ++j) dot += latents[p](i, j) * latents[q](i, j);
        sum += std::abs(dot) / (np * nq);
        ++used;
      }
      pair.score = used > 0 ? sum / static_cast<double>(used) : std::nan("");
      s.pairs.push_back(pair);
      if (used > 0) scores.push_back(pair.score);
    }
  if (scores.empty()) {
    s.mean = s.std = s.min = s.max = std::nan("");
    return s;
  }
  s.min = s.max = scores.front();
  for (double v : scores) {
    s.mean += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean /= static_cast<double>(scores.size());
  for (double v : scores) s.std += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(s.std / static_cast<double>(scores.size()));
  return s;
}

void write_metric_csv(std::ostream& out, const std::vector<MetricReport>& rows, const std::string& config_hash) {
  CsvWriter csv(out, {"metric", "variant", "grid", "rank", "seed", "noise_level", "value", "dispersion", "config_hash"});
  for (const MetricReport& r : rows)
    csv.row({r.metric, r.variant, csv_field(r.grid), csv_field(r.rank), csv_field(r.seed), csv_field(r.noise_level),
             csv_field(r.value), csv_field(r.dispersion), config_hash});
}

}  // namespace hrom
