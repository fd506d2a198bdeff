#include "hrom/koopman/koopman.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "hrom/errors.hpp"
#include "hrom/evaluation/metrics.hpp"
#include "hrom/numerics/fft.hpp"
#include "hrom/rom/pod.hpp"

namespace hrom {

DenseMatrix koopman_features(std::span<const double> omega, std::span<const double> times) {
  const std::size_t nf = omega.size();
  DenseMatrix f(times.size(), 2 * nf);
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t j = 0; j < nf; ++j) {
      const double phase = times[i] * omega[j];
      f(i, j) = std::cos(phase);
      f(i, nf + j) = std::sin(phase);
    }
  return f;
}

namespace {

// Energy captured by the least-squares fit of c0 + c1 cos(w t) + c2 sin(w t).
double fit_energy(std::span<const double> x, double omega, double dt) {
  double g[3][3] = {}, r[3] = {};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double phase = omega * dt * static_cast<double>(i);
    const double basis[3] = {1.0, std::cos(phase), std::sin(phase)};
    for (int p = 0; p < 3; ++p) {
      r[p] += basis[p] * x[i];
      for (int q = 0; q < 3; ++q) g[p][q] += basis[p] * basis[q];
    }
  }
  // Gaussian elimination; g is symmetric positive definite away from w = 0.
  double c[3] = {r[0], r[1], r[2]};
  for (int k = 0; k < 3; ++k) {
    if (std::abs(g[k][k]) < 1e-300) return 0.0;
    for (int i = k + 1; i < 3; ++i) {
      const double f = g[i][k] / g[k][k];
      for (int j = k; j < 3; ++j) g[i][j] -= f * g[k][j];
      c[i] -= f * c[k];
    }
  }
  double coef[3];
  for (int k = 2; k >= 0; --k) {
    double acc = c[k];
    for (int j = k + 1; j < 3; ++j) acc -= g[k][j] * coef[j];
    coef[k] = acc / g[k][k];
  }
  return coef[0] * r[0] + coef[1] * r[1] + coef[2] * r[2];
}

}  // namespace

std::optional<double> dominant_frequency(std::span<const double> series, double dt) {
  const std::size_t n = series.size();
  if (n < 4) throw DomainError("dominant_frequency: need at least 4 samples");
  if (!(dt > 0.0)) throw DomainError("dominant_frequency: dt must be positive");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> centered(n);
  std::vector<std::complex<double>> buf(next_power_of_two(4 * n));
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
    centered[i] = series[i] - mean;
    buf[i] = hann * centered[i];
    energy += centered[i] * centered[i];
  }
  if (energy == 0.0) return std::nullopt;

  const std::size_t p = buf.size();
  FftPlan(p).forward(buf);
  std::size_t best = 1;
  for (std::size_t k = 2; k <= p / 2; ++k)
    if (std::abs(buf[k]) > std::abs(buf[best])) best = k;

  // The windowed peak is biased when the record holds few periods; refine on
  // the least-squares fit energy within one unpadded bin of it.
  const double nyquist = std::numbers::pi / dt;
  const double centre = 2.0 * std::numbers::pi * static_cast<double>(best) / (static_cast<double>(p) * dt);
  const double width = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  const double lo0 = std::max(centre - width, 1e-3 * width), hi0 = std::min(centre + width, nyquist);
  constexpr int scan = 64;
  double best_w = centre, best_e = -1.0;
  for (int i = 0; i <= scan; ++i) {
    const double w = lo0 + (hi0 - lo0) * i / scan;
    const double e = fit_energy(centered, w, dt);
    if (e > best_e) {
      best_e = e;
      best_w = w;
    }
  }
  double lo = std::max(lo0, best_w - (hi0 - lo0) / scan), hi = std::min(hi0, best_w + (hi0 - lo0) / scan);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = fit_energy(centered, x1, dt), f2 = fit_energy(centered, x2, dt);
  for (int it = 0; it < 100 && hi - lo > 1e-14 * hi; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = fit_energy(centered, x2, dt);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = fit_energy(centered, x1, dt);
    }
  }
  return 0.5 * (lo + hi);
}

KoopmanModel::KoopmanModel(HybridAutoencoder decoder, std::vector<double> omega, double dt)
    : decoder_(std::move(decoder)), dt_(dt) {
  if (!decoder_.spec().decoder_only) throw ConfigError("koopman: the model must be decoder-only");
  if (decoder_.rank() % 2 != 0 || decoder_.rank() == 0) throw ConfigError("koopman: rank must be 2 * n_frequencies");
  if (omega.size() != n_frequencies())
    throw ConfigError("koopman: expected " + std::to_string(n_frequencies()) + " frequencies, got " +
                      std::to_string(omega.size()));
  for (double w : omega)
    if (!std::isfinite(w)) throw ConfigError("koopman: frequencies must be finite");
  if (!(dt > 0.0)) throw ConfigError("koopman: dt must be positive");
  DenseMatrix row = DenseMatrix::row_vector(omega);
  if (auto slot = decoder_.params().find("omega")) {
    omega_slot_ = *slot;
    decoder_.params()[omega_slot_].value = row;
  } else {
    omega_slot_ = decoder_.params().add("omega", row, ParamGroup::Frequency);
  }
}

std::vector<double> KoopmanModel::omega() const { return params()[omega_slot_].value.values(); }

DenseMatrix KoopmanModel::decode_times(std::span<const double> times) const {
  const std::vector<double> w = omega();
  return decoder_.decode(koopman_features(w, times));
}

Tape::Var KoopmanModel::decode(Tape& tape, Tape::Var times) const {
  Tape::Var phase = tape.matmul(times, tape.parameter(params(), omega_slot_));
  return decoder_.decode(tape, tape.concat_cols(tape.cos(phase), tape.sin(phase)));
}

Container KoopmanModel::to_container() const {
  Container c = decoder_.to_container();
  c.set_meta("koopman_dt", std::to_string(dt_));
  c.set_meta("n_frequencies", std::to_string(n_frequencies()));
  return c;
}

KoopmanModel KoopmanModel::from_container(const Container& c) {
  HybridAutoencoder dec = HybridAutoencoder::from_container(c);
  const auto slot = dec.params().find("omega");
  if (!slot) throw IoError("koopman checkpoint has no omega tensor");
  std::vector<double> omega = dec.params()[*slot].value.values();
  return KoopmanModel(std::move(dec), std::move(omega), std::stod(c.meta("koopman_dt")));
}

KoopmanModel build_koopman(Variant variant, const SnapshotMatrix& snapshots, std::size_t n_frequencies,
                           const Architecture& architecture, double dt, RandomStream& stream) {
  if (n_frequencies == 0) throw ConfigError("koopman: n_frequencies must be positive");
  const std::size_t rank = 2 * n_frequencies;
  const DenseMatrix train = snapshots.train();
  PodBasis pod = compute_pod(train, rank, snapshots.stats);

  std::vector<double> omega(n_frequencies);
  const DenseMatrix coeff = pod.encode(train);
  for (std::size_t j = 0; j < n_frequencies; ++j) {
    const std::vector<double> series = coeff.column(j);
    const auto w = dominant_frequency(series, dt);
    omega[j] = w ? *w : stream.uniform(0.0, std::numbers::pi / dt);
  }

  ModelSpec spec;
  spec.variant = variant;
  spec.rank = rank;
  spec.n_cells = snapshots.n_cells;
  spec.n_components = snapshots.n_components;
  spec.architecture = architecture;
  spec.decoder_only = true;
  std::optional<PodBasis> basis;
  if (uses_pod(variant)) basis = std::move(pod);
  HybridAutoencoder decoder = build_model(spec, basis, snapshots.stats, stream);
  return KoopmanModel(std::move(decoder), std::move(omega), dt);
}

TrainReport train_koopman(KoopmanModel& model, const DenseMatrix& train, const std::vector<double>& train_times,
                          const DenseMatrix& test, const std::vector<double>& test_times, const TrainConfig& config) {
  if (train.rows() != train_times.size() || test.rows() != test_times.size())
    throw ValidationError("train_koopman: one time per snapshot row is required");
  auto evaluate = [&] {
    EvalPoint p;
    p.train_error = l2_error(train, model.decode_times(train_times));
    p.test_error = test.rows() > 0 ? l2_error(test, model.decode_times(test_times)) : std::nan("");
    return p;
  };
  auto batch_loss = [&](Tape& tape, const std::vector<std::size_t>& rows) {
    DenseMatrix t(rows.size(), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) t(i, 0) = train_times[rows[i]];
    Tape::Var x = tape.input(train.gather_rows(rows));
    return tape.mse(model.decode(tape, tape.input(std::move(t))), x);
  };
  return run_training(model.params(), train.rows(), batch_loss, evaluate, config,
                      1.0 / static_cast<double>(model.decoder().n_features()));
}

}  // namespace hrom
