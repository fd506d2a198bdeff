#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hrom/experiment/config.hpp"

namespace hrom {

struct RunOptions {
  std::size_t workers = 1;
  /// Progress lines go here when set.
  std::ostream* log = nullptr;
};

struct RunSummary {
  std::string config_hash;
  std::vector<std::filesystem::path> files;  ///< CSVs written, in order
  std::vector<std::string> warnings;
};

/// Executes the experiment and writes into `out_dir`:
///   config.json       canonical config (hash input)
///   provenance.json   hash, version, timestamps
///   results.csv       one row per (variant, rank, seed) for autoencoder kinds
///   history.csv       evaluation checkpoints of every training run
///   metrics.csv       metric rows for sharpness/noise/contribution/similarity
///   koopman.csv       one row per (variant, seed, frequency) for koopman
///   surrogate.csv     one row per (variant, seed, test trajectory) for surrogate
///   checkpoints/      model containers when save_checkpoints is set
/// Every CSV row carries the config hash. Nothing but provenance.json depends
/// on the clock or the worker count.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                          const RunOptions& options = {});

struct GenerateSummary {
  std::filesystem::path file;
  std::size_t rows = 0;
  std::size_t n_cells = 0;
  std::size_t n_components = 0;
  std::uint64_t seed = 0;
  std::string generator;
};

/// Generates the dataset and writes <out_dir>/dataset.hrc.
GenerateSummary generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir);

struct ReportSummary {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> skipped;  ///< "path: reason"
};

/// Aggregates every results.csv, metrics.csv, koopman.csv and surrogate.csv
/// under `result_dir` (recursively) into per-group mean/std tables written to
/// `out_dir`, plus convergence-rate fits for reconstruction runs with at least
/// three ranks. Unreadable tables are listed and skipped.
ReportSummary report_results(const std::filesystem::path& result_dir, const std::filesystem::path& out_dir);

/// Human-readable header dump of a container file (checkpoint or dataset).
void inspect_file(const std::filesystem::path& path, std::ostream& out);

}  // namespace hrom
