#include "hrom/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "hrom/data/burgers.hpp"
#include "hrom/data/ks.hpp"
#include "hrom/data/wave.hpp"
#include "hrom/errors.hpp"

namespace hrom {

namespace {

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

DenseMatrix column_of(const std::vector<double>& v) { return DenseMatrix::column_vector(v); }

}  // namespace

void Dataset::validate() const {
  if (n_cells * n_components != data.cols())
    throw ValidationError("dataset: n_cells * n_components does not match the feature count");
  if (time.size() != rows() || trajectory.size() != rows() || parameter.size() != rows())
    throw ValidationError("dataset: per-row metadata length does not match the row count");
}

Container Dataset::to_container() const {
  validate();
  Container c("dataset");
  c.set_meta("generator", generator);
  c.set_meta("n_cells", std::to_string(n_cells));
  c.set_meta("n_components", std::to_string(n_components));
  c.set_meta("rows", std::to_string(rows()));
  c.set_meta("dt", format_double(dt));
  c.set_meta("seed", std::to_string(seed));
  c.add_tensor("data", data, "data");
  c.add_tensor("time", column_of(time), "meta");
  std::vector<double> traj(trajectory.begin(), trajectory.end());
  c.add_tensor("trajectory", column_of(traj), "meta");
  c.add_tensor("parameter", column_of(parameter), "meta");
  return c;
}

Dataset Dataset::from_container(const Container& c) {
  if (c.kind() != "dataset") throw IoError("expected a dataset container, found kind '" + c.kind() + "'");
  Dataset d;
  d.generator = c.meta("generator");
  d.n_cells = std::stoull(c.meta("n_cells"));
  d.n_components = std::stoull(c.meta("n_components"));
  d.dt = std::stod(c.meta("dt"));
  d.seed = std::stoull(c.meta("seed"));
  d.data = c.tensor("data");
  d.time = c.tensor("time").values();
  d.parameter = c.tensor("parameter").values();
  for (double v : c.tensor("trajectory").values()) d.trajectory.push_back(static_cast<std::size_t>(v));
  d.validate();
  return d;
}

void Dataset::save(const std::filesystem::path& path) const { to_container().save(path); }

Dataset Dataset::load(const std::filesystem::path& path) { return from_container(Container::load(path)); }

void Dataset::write_csv(std::ostream& out) const {
  out << "trajectory,time,parameter";
  for (std::size_t j = 0; j < n_features(); ++j) out << ",u" << j;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < rows(); ++i) {
    out << trajectory[i] << ',' << time[i] << ',' << parameter[i];
    for (double v : data.row(i)) out << ',' << v;
    out << '\n';
  }
}

Dataset make_ks_dataset(const KsConfig& config) {
  KsTrajectory t = simulate_ks(config);
  Dataset d;
  d.generator = "ks";
  d.data = std::move(t.snapshots);
  d.n_cells = config.n;
  d.dt = config.dt * static_cast<double>(config.save_every);
  d.seed = config.seed;
  d.time = std::move(t.time);
  d.trajectory.assign(d.data.rows(), 0);
  d.parameter.assign(d.data.rows(), 0.0);
  return d;
}

Dataset make_burgers_dataset(const BurgersConfig& base, const std::vector<double>& reynolds) {
  if (reynolds.empty()) throw ConfigError("burgers: no Reynolds numbers given");
  base.validate();
  Dataset d;
  d.generator = "burgers";
  d.n_cells = base.nx;
  d.dt = base.terminal_time / static_cast<double>(base.nt - 1);
  d.data = DenseMatrix(base.nt * reynolds.size(), base.nx);
  const auto times = burgers_times(base);
  for (std::size_t r = 0; r < reynolds.size(); ++r) {
    BurgersConfig c = base;
    c.re = reynolds[r];
    DenseMatrix u = burgers_trajectory(c);
    for (std::size_t i = 0; i < base.nt; ++i) {
      std::copy(u.row(i).begin(), u.row(i).end(), d.data.row(r * base.nt + i).begin());
      d.time.push_back(times[i]);
      d.trajectory.push_back(r);
      d.parameter.push_back(c.re);
    }
  }
  return d;
}

Dataset make_wave_dataset(const WaveConfig& config) {
  Dataset d;
  d.generator = "wave";
  d.data = traveling_wave(config);
  d.n_cells = config.nx;
  d.dt = 1.0;
  for (std::size_t i = 0; i < config.n_steps; ++i) d.time.push_back(static_cast<double>(i));
  d.trajectory.assign(config.n_steps, 0);
  d.parameter.assign(config.n_steps, 0.0);
  return d;
}

Split split_shuffled(std::size_t m, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split: ratio must lie in (0, 1)");
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  RandomStream rs(seed);
  for (std::size_t i = m; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rs.uniform_int(0, static_cast<std::int64_t>(i - 1)));
    std::swap(perm[i - 1], perm[j]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(m)));
  Split s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  return s;
}

Split split_by_time(std::size_t m, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("split: fraction must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(m)));
  Split s;
  for (std::size_t i = 0; i < m; ++i) (i < n_train ? s.train : s.test).push_back(i);
  return s;
}

Split split_by_parameter(const Dataset& dataset, const std::vector<double>& train_values,
                         const std::vector<double>& test_values) {
  const std::set<double> tr(train_values.begin(), train_values.end());
  const std::set<double> te(test_values.begin(), test_values.end());
  for (double v : tr)
    if (te.count(v)) throw ConfigError("split: parameter value " + format_double(v) + " is in both train and test sets");
  Split s;
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    if (tr.count(dataset.parameter[i])) s.train.push_back(i);
    else if (te.count(dataset.parameter[i])) s.test.push_back(i);
  }
  return s;
}

Standardization Standardization::identity(std::size_t n_features) {
  return {DenseMatrix(1, n_features, 0.0), DenseMatrix(1, n_features, 1.0)};
}

Standardization Standardization::fit(const DenseMatrix& data, const std::vector<std::size_t>& rows) {
  if (rows.empty()) throw DomainError("standardize: empty training split");
  const std::size_t f = data.cols();
  Standardization s{DenseMatrix(1, f), DenseMatrix(1, f, 1.0)};
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (std::size_t r : rows) {
    const double* row = data.row(r).data();
    for (std::size_t j = 0; j < f; ++j) s.mean.data()[j] += row[j];
  }
  for (std::size_t j = 0; j < f; ++j) s.mean.data()[j] *= inv;
  std::vector<double> var(f, 0.0);
  for (std::size_t r : rows) {
    const double* row = data.row(r).data();
    for (std::size_t j = 0; j < f; ++j) {
      const double d = row[j] - s.mean.data()[j];
      var[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < f; ++j) {
    const double sd = std::sqrt(var[j] * inv);
    s.scale.data()[j] = sd < 1e-12 ? 1.0 : sd;
  }
  return s;
}

DenseMatrix Standardization::apply(const DenseMatrix& x) const {
  if (x.cols() != n_features()) throw ValidationError("standardize: feature count mismatch");
  DenseMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = (x(i, j) - mean.data()[j]) / scale.data()[j];
  return out;
}

DenseMatrix Standardization::invert(const DenseMatrix& x) const {
  if (x.cols() != n_features()) throw ValidationError("destandardize: feature count mismatch");
  DenseMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) * scale.data()[j] + mean.data()[j];
  return out;
}

SnapshotMatrix standardize(const Dataset& dataset, const Split& split, bool enabled) {
  if (split.train.empty()) throw DomainError("standardize: empty training split");
  SnapshotMatrix s;
  s.stats = enabled ? Standardization::fit(dataset.data, split.train) : Standardization::identity(dataset.n_features());
  s.data = enabled ? s.stats.apply(dataset.data) : dataset.data;
  s.split = split;
  s.n_cells = dataset.n_cells;
  s.n_components = dataset.n_components;
  return s;
}

DenseMatrix add_noise(const DenseMatrix& clean, double level, double amplitude, RandomStream& stream) {
  if (!(level >= 0.0)) throw DomainError("add_noise: level must be >= 0");
  DenseMatrix out = clean;
  if (level == 0.0) return out;
  const double sd = level * amplitude;
  for (double& v : out.flat()) v += stream.normal(0.0, sd);
  return out;
}

}  // namespace hrom
