#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hrom/data/burgers.hpp"
#include "hrom/data/dataset.hpp"
#include "hrom/data/ks.hpp"
#include "hrom/data/wave.hpp"
#include "hrom/evaluation/metrics.hpp"
#include "hrom/rom/hybrid_autoencoder.hpp"
#include "hrom/surrogate/pipeline.hpp"
#include "hrom/training/trainer.hpp"

namespace hrom {

enum class ExperimentKind { Reconstruction, Koopman, Surrogate, Sharpness, Noise, Contribution, Similarity };

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(std::string_view name);

struct DatasetSpec {
  /// "ks", "burgers" or "wave"; ignored when `path` is set.
  std::string generator = "ks";
  /// Dataset container written by `generate`.
  std::string path;
  KsConfig ks;
  BurgersConfig burgers;
  std::vector<double> train_re = burgers_train_reynolds();
  std::vector<double> test_re = burgers_test_reynolds();
  WaveConfig wave;
  /// "shuffled", "time" or "parameter"; empty picks the generator's default
  /// (ks shuffled, wave time, burgers parameter).
  std::string split;
  double ratio = 0.7;
  std::uint64_t split_seed = 0;
  double fraction = 0.5;
  /// Burgers defaults to false, everything else to true.
  int standardize = -1;

  std::string effective_generator() const;
  std::string effective_split() const;
  bool effective_standardize() const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Reconstruction;
  DatasetSpec dataset;
  std::vector<Variant> variants{Variant::Pod, Variant::Ae, Variant::SimpleHybrid, Variant::LearnableWeightedHybrid};
  std::vector<std::size_t> ranks;
  std::vector<std::uint64_t> seeds{0};
  /// Empty lists select the default widths (2r for the autoencoders).
  std::vector<std::size_t> encoder_hidden;
  std::vector<std::size_t> decoder_hidden;
  bool custom_architecture = false;
  TrainConfig train;
  SharpnessConfig sharpness;
  std::vector<double> noise_levels{0.1, 0.2, 0.3};
  /// Extra metric kinds computed on reconstruction-family runs.
  std::vector<ExperimentKind> extra_metrics;
  std::size_t n_frequencies = 1;
  double koopman_dt = 1.0;
  SurrogateConfig surrogate;
  bool save_checkpoints = true;

  Architecture architecture(std::size_t rank) const;
  /// Throws ValidationError naming the offending field.
  void validate() const;

  /// Parses JSON text. Unknown keys and wrong types are ValidationErrors whose
  /// message starts with the dotted field path.
  static ExperimentConfig parse(std::string_view json_text);
  static ExperimentConfig load(const std::filesystem::path& path);
  /// Parses only the "dataset" section, or a bare dataset object.
  static DatasetSpec parse_dataset(std::string_view json_text);

  /// Adds k to every seed.
  void apply_seed_offset(std::uint64_t k);

  /// Every field with defaults filled in, keys sorted, compact.
  std::string canonical_json() const;
  /// FNV-1a 64 of canonical_json(), 16 lowercase hex digits.
  std::string hash() const;
};

std::string fnv1a64_hex(std::string_view bytes);

/// Loads `path` when set, otherwise runs the generator.
Dataset build_dataset(const DatasetSpec& spec);
Split build_split(const DatasetSpec& spec, const Dataset& dataset);

}  // namespace hrom
