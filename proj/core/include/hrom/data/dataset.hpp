#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hrom/neural/container.hpp"
#include "hrom/numerics/dense_matrix.hpp"
#include "hrom/numerics/random.hpp"

namespace hrom {

/// Raw generated snapshots: M rows of N*Q features, feature index = cell*Q + component.
struct Dataset {
  std::string generator;  ///< "ks", "burgers", "wave" or "custom"
  DenseMatrix data;
  std::size_t n_cells = 0;
  std::size_t n_components = 1;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> time;             ///< per row
  std::vector<std::size_t> trajectory;  ///< per row
  std::vector<double> parameter;        ///< per row (Re for Burgers, 0 otherwise)

  std::size_t rows() const noexcept { return data.rows(); }
  std::size_t n_features() const noexcept { return data.cols(); }
  void validate() const;

  Container to_container() const;
  static Dataset from_container(const Container& c);
  void save(const std::filesystem::path& path) const;
  static Dataset load(const std::filesystem::path& path);
  /// One row per snapshot: trajectory, time, parameter, u0..u{F-1}.
  void write_csv(std::ostream& out) const;
};

struct KsConfig;
struct BurgersConfig;
struct WaveConfig;

Dataset make_ks_dataset(const KsConfig& config);
/// One trajectory per Reynolds number, stacked in the order given.
Dataset make_burgers_dataset(const BurgersConfig& base, const std::vector<double>& reynolds);
Dataset make_wave_dataset(const WaveConfig& config);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Random permutation of 0..m-1; the first round(ratio*m) go to train.
Split split_shuffled(std::size_t m, double ratio, std::uint64_t seed);
/// The first round(fraction*m) rows train, the rest test.
Split split_by_time(std::size_t m, double fraction);
/// Rows whose parameter lies in `train_values` / `test_values`. Throws
/// ConfigError when the two sets overlap. Rows in neither set are dropped.
Split split_by_parameter(const Dataset& dataset, const std::vector<double>& train_values,
                         const std::vector<double>& test_values);

/// Per-feature affine map x -> (x - mean) / scale.
struct Standardization {
  DenseMatrix mean;   ///< 1 x F
  DenseMatrix scale;  ///< 1 x F

  static Standardization identity(std::size_t n_features);
  /// Statistics over `rows` (population std). Features with std < 1e-12 keep
  /// scale 1, i.e. they are only centered. Throws DomainError when rows is empty.
  static Standardization fit(const DenseMatrix& data, const std::vector<std::size_t>& rows);

  std::size_t n_features() const noexcept { return mean.cols(); }
  DenseMatrix apply(const DenseMatrix& x) const;
  DenseMatrix invert(const DenseMatrix& x) const;
};

/// Standardized snapshots plus the split they were fitted on.
struct SnapshotMatrix {
  DenseMatrix data;  ///< all rows, standardized
  Standardization stats;
  Split split;
  std::size_t n_cells = 0;
  std::size_t n_components = 1;

  DenseMatrix train() const { return data.gather_rows(split.train); }
  DenseMatrix test() const { return data.gather_rows(split.test); }
  std::size_t n_features() const noexcept { return data.cols(); }
};

/// With `enabled` false the identity map is used (data left in raw units).
SnapshotMatrix standardize(const Dataset& dataset, const Split& split, bool enabled = true);

/// clean + N(0, (level*amplitude)^2) per entry. level 0 returns an exact copy.
DenseMatrix add_noise(const DenseMatrix& clean, double level, double amplitude, RandomStream& stream);

}  // namespace hrom
