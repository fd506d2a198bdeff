// hybrid-rom: generate datasets, run experiments, aggregate and inspect results.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hrom/errors.hpp"
#include "hrom/experiment/config.hpp"
#include "hrom/experiment/runner.hpp"
#include "hrom/util/parallel.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kValidationExit = 2;
constexpr int kRuntimeExit = 1;

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw hrom::ValidationError("--config: cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid POD / autoencoder reduced-order modeling experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, result_dir, inspect_path;
  std::size_t workers = 0;
  std::uint64_t seed_offset = 0;

  auto* gen = app.add_subcommand("generate", "Generate a dataset from the dataset section of a config");
  gen->add_option("--config", config_path, "JSON config (experiment or bare dataset spec)")->required();
  gen->add_option("--out", out_dir, "Output directory")->required();

  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("--config", config_path, "JSON experiment config")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--workers", workers, "Worker threads (default: HYBRID_ROM_WORKERS or 1)");
  run->add_option("--seed-offset", seed_offset, "Added to every seed in the config");

  auto* rep = app.add_subcommand("report", "Aggregate result tables");
  rep->add_option("results", result_dir, "Directory holding run outputs")->required();
  rep->add_option("--out", out_dir, "Output directory (default: the results directory)");

  auto* ins = app.add_subcommand("inspect", "Print the header of a checkpoint or dataset file");
  ins->add_option("file", inspect_path, "Container file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationExit;
  }

  try {
    if (*gen) {
      const hrom::DatasetSpec spec = hrom::ExperimentConfig::parse_dataset(read_text(config_path));
      const hrom::GenerateSummary g = hrom::generate_dataset(spec, out_dir);
      std::cout << "wrote " << g.file.string() << '\n'
                << "generator " << g.generator << " M " << g.rows << " N " << g.n_cells << " Q " << g.n_components
                << " seed " << g.seed << '\n';
    } else if (*run) {
      hrom::ExperimentConfig cfg = hrom::ExperimentConfig::parse(read_text(config_path));
      cfg.apply_seed_offset(seed_offset);
      hrom::RunOptions opt;
      opt.workers = run->count("--workers") ? workers : hrom::workers_from_env(1);
      if (opt.workers == 0) throw hrom::ValidationError("--workers: must be positive");
      opt.log = &std::cerr;
      const hrom::RunSummary s = hrom::run_experiment(cfg, out_dir, opt);
      for (const std::string& w : s.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "config_hash " << s.config_hash << '\n';
      for (const fs::path& f : s.files) std::cout << "wrote " << f.string() << '\n';
    } else if (*rep) {
      const hrom::ReportSummary s = hrom::report_results(result_dir, out_dir.empty() ? result_dir : out_dir);
      for (const std::string& k : s.skipped) std::cerr << "skipped " << k << '\n';
      for (const fs::path& f : s.files) std::cout << "wrote " << f.string() << '\n';
    } else if (*ins) {
      hrom::inspect_file(inspect_path, std::cout);
    }
  } catch (const hrom::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidationExit;
  } catch (const hrom::ConfigError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidationExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeExit;
  }
  return 0;
}
