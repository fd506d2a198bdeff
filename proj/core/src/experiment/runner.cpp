#include "hrom/experiment/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "hrom/errors.hpp"
#include "hrom/evaluation/metrics.hpp"
#include "hrom/koopman/koopman.hpp"
#include "hrom/util/csv.hpp"
#include "hrom/util/parallel.hpp"

#ifndef HROM_VERSION
#define HROM_VERSION "unknown"
#endif

namespace hrom {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void log_line(const RunOptions& o, const std::string& s) {
  if (o.log) *o.log << s << '\n' << std::flush;
}

std::string member_name(Variant v, std::size_t rank, std::uint64_t seed) {
  return std::string(to_string(v)) + "_r" + std::to_string(rank) + "_s" + std::to_string(seed);
}

bool wants(const ExperimentConfig& c, ExperimentKind k) {
  return c.kind == k || std::find(c.extra_metrics.begin(), c.extra_metrics.end(), k) != c.extra_metrics.end();
}

const std::vector<std::string> kHistoryHeader{"variant", "rank", "seed", "epoch", "train_error", "test_error", "config_hash"};

void write_history(CsvWriter& csv, Variant v, std::size_t rank, std::uint64_t seed, const TrainReport& r,
                   const std::string& hash) {
  for (const EvalPoint& p : r.evaluations)
    csv.row({std::string(to_string(v)), csv_field(rank), csv_field(seed), csv_field(p.epoch), csv_field(p.train_error),
             csv_field(p.test_error), hash});
}

struct Context {
  const ExperimentConfig& config;
  const fs::path& out_dir;
  const RunOptions& options;
  std::string hash;
  RunSummary summary;
  Dataset dataset;
  Split split;
};

// Metric rows for one trained autoencoder.
std::vector<MetricReport> member_metrics(Context& ctx, const SnapshotMatrix& s, HybridAutoencoder& model,
                                         std::uint64_t seed) {
  const ExperimentConfig& c = ctx.config;
  std::vector<MetricReport> rows;
  MetricReport base;
  base.variant = std::string(to_string(model.variant()));
  base.grid = s.n_cells;
  base.rank = model.rank();
  base.seed = seed;
  auto add = [&](std::string metric, double value, double dispersion = 0.0, double level = 0.0) {
    MetricReport r = base;
    r.metric = std::move(metric);
    r.value = value;
    r.dispersion = dispersion;
    r.noise_level = level;
    rows.push_back(r);
  };
  if (wants(c, ExperimentKind::Sharpness)) {
    SharpnessConfig sc = c.sharpness;
    sc.seed = RandomStream::derive_seed(c.sharpness.seed, seed);
    const SharpnessResult r = estimate_sharpness(model, s.train(), sc);
    add("sharpness", r.value, r.dispersion);
    if (r.n_nonfinite > 0)
      ctx.summary.warnings.push_back(member_name(model.variant(), model.rank(), seed) + ": " +
                                     std::to_string(r.n_nonfinite) + " sharpness directions were not finite");
  }
  if (wants(c, ExperimentKind::Noise)) {
    const DenseMatrix clean = ctx.dataset.data.gather_rows(ctx.split.test);
    const double amplitude = max_abs(ctx.dataset.data);
    std::vector<double> levels{0.0};
    for (double l : c.noise_levels)
      if (l != 0.0) levels.push_back(l);
    const auto sweep = noise_robustness_sweep(model, clean, levels, amplitude, RandomStream(RandomStream::derive_seed(seed, 7)));
    for (const NoiseLevelResult& n : sweep) add("noise_l2_error", n.error, 0.0, n.level);
    for (const NoiseLevelResult& n : sweep)
      add("noise_degradation", sweep.front().error > 0.0 ? n.error / sweep.front().error : std::nan(""), 0.0, n.level);
  }
  if (wants(c, ExperimentKind::Contribution) && model.variant() == Variant::LearnableWeightedHybrid) {
    const ContributionSplit cs = contribution_split(model, s.test());
    add("latent_pod_share", cs.latent_pod);
    add("latent_nn_share", cs.latent_nn);
    add("reconstruction_pod_share", cs.reconstruction_pod);
    add("reconstruction_nn_share", cs.reconstruction_nn);
    add("contribution_zero_denominator", static_cast<double>(cs.zero_denominator));
  }
  return rows;
}

void run_autoencoder_kind(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const SnapshotMatrix s = standardize(ctx.dataset, ctx.split, c.dataset.effective_standardize());
  const bool metrics = wants(c, ExperimentKind::Sharpness) || wants(c, ExperimentKind::Noise) ||
                       wants(c, ExperimentKind::Contribution) || wants(c, ExperimentKind::Similarity);
  if (wants(c, ExperimentKind::Contribution) &&
      std::find(c.variants.begin(), c.variants.end(), Variant::LearnableWeightedHybrid) == c.variants.end())
    ctx.summary.warnings.push_back("contribution: no learnable weighted hybrid among the variants");

  const fs::path results_path = ctx.out_dir / "results.csv", history_path = ctx.out_dir / "history.csv";
  std::ofstream results_out = open_out(results_path), history_out = open_out(history_path);
  CsvWriter results(results_out, {"kind", "variant", "grid", "rank", "seed", "status", "train_error", "test_error",
                                  "initial_train_error", "best_epoch", "best_train_error", "best_test_error", "epochs",
                                  "message", "config_hash"});
  CsvWriter history(history_out, kHistoryHeader);
  std::vector<MetricReport> metric_rows;

  for (Variant v : c.variants) {
    log_line(ctx.options, "training " + std::string(to_string(v)));
    EnsembleOptions eo;
    eo.workers = ctx.options.workers;
    eo.keep_models = metrics || c.save_checkpoints;
    eo.architecture = [&c](std::size_t r) { return c.architecture(r); };
    EnsembleResult er = ensemble_train(v, s, c.ranks, c.seeds, c.train, eo);
    for (const std::string& w : er.warnings) ctx.summary.warnings.push_back(w);

    for (EnsembleMember& m : er.members) {
      const double nan = std::nan("");
      if (m.report) {
        const TrainReport& r = *m.report;
        results.row({std::string(to_string(c.kind)), std::string(to_string(v)), csv_field(s.n_cells), csv_field(m.rank),
                     csv_field(m.seed), "ok", csv_field(r.final_train_error), csv_field(r.final_test_error),
                     csv_field(r.initial_train_error), csv_field(r.best_epoch), csv_field(r.best_train_error),
                     csv_field(r.best_test_error), csv_field(c.train.epochs), "", ctx.hash});
        write_history(history, v, m.rank, m.seed, r, ctx.hash);
      } else {
        results.row({std::string(to_string(c.kind)), std::string(to_string(v)), csv_field(s.n_cells), csv_field(m.rank),
                     csv_field(m.seed), "failed", csv_field(nan), csv_field(nan), csv_field(nan), "0", csv_field(nan),
                     csv_field(nan), csv_field(c.train.epochs), m.error, ctx.hash});
      }
      if (m.model && c.save_checkpoints) {
        fs::create_directories(ctx.out_dir / "checkpoints");
        m.model->to_container().save(ctx.out_dir / "checkpoints" / (member_name(v, m.rank, m.seed) + ".hrc"));
      }
    }

    if (!metrics) continue;
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < er.members.size(); ++i)
      if (er.members[i].model) ok.push_back(i);
    std::vector<std::vector<MetricReport>> per(ok.size());
    parallel_for(ok.size(), ctx.options.workers, [&](std::size_t j) {
      EnsembleMember& m = er.members[ok[j]];
      per[j] = member_metrics(ctx, s, *m.model, m.seed);
    });
    for (auto& rows : per) metric_rows.insert(metric_rows.end(), rows.begin(), rows.end());

    if (wants(c, ExperimentKind::Similarity)) {
      for (std::size_t rank : c.ranks) {
        std::vector<DenseMatrix> latents;
        for (std::size_t i : ok)
          if (er.members[i].rank == rank) latents.push_back(er.members[i].model->encode(s.test()));
        if (latents.size() < 2) {
          ctx.summary.warnings.push_back("similarity: fewer than two trained seeds for " + std::string(to_string(v)) +
                                         " rank " + std::to_string(rank));
          continue;
        }
        const SimilaritySummary sim = latent_cosine_similarity(latents);
        MetricReport r;
        r.variant = std::string(to_string(v));
        r.grid = s.n_cells;
        r.rank = rank;
        r.seed = c.seeds.front();
        r.metric = "latent_cosine_similarity";
        r.value = sim.mean;
        r.dispersion = sim.std;
        metric_rows.push_back(r);
        r.metric = "latent_cosine_min";
        r.value = sim.min;
        r.dispersion = 0.0;
        metric_rows.push_back(r);
        r.metric = "latent_cosine_max";
        r.value = sim.max;
        metric_rows.push_back(r);
      }
    }
  }
  ctx.summary.files.push_back(results_path);
  ctx.summary.files.push_back(history_path);
  if (metrics) {
    const fs::path p = ctx.out_dir / "metrics.csv";
    std::ofstream out = open_out(p);
    write_metric_csv(out, metric_rows, ctx.hash);
    ctx.summary.files.push_back(p);
  }
}

std::vector<double> row_values(const std::vector<double>& all, const std::vector<std::size_t>& rows) {
  std::vector<double> out;
  for (std::size_t i : rows) out.push_back(all.at(i));
  return out;
}

void run_koopman_kind(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const SnapshotMatrix s = standardize(ctx.dataset, ctx.split, c.dataset.effective_standardize());
  const DenseMatrix train = s.train(), test = s.test();
  const std::vector<double> train_t = row_values(ctx.dataset.time, ctx.split.train);
  const std::vector<double> test_t = row_values(ctx.dataset.time, ctx.split.test);

  struct Job {
    Variant variant;
    std::uint64_t seed;
    std::vector<double> omega0, omega;
    TrainReport report;
    Container checkpoint;
  };
  std::vector<Job> jobs;
  for (Variant v : c.variants)
    for (std::uint64_t seed : c.seeds) jobs.push_back({v, seed, {}, {}, {}, {}});
  const Architecture arch = c.architecture(2 * c.n_frequencies);
  parallel_for(jobs.size(), ctx.options.workers, [&](std::size_t i) {
    Job& j = jobs[i];
    RandomStream rs(j.seed);
    KoopmanModel m = build_koopman(j.variant, s, c.n_frequencies, arch, c.koopman_dt, rs);
    j.omega0 = m.omega();
    TrainConfig tc = c.train;
    tc.seed = j.seed;
    j.report = train_koopman(m, train, train_t, test, test_t, tc);
    j.omega = m.omega();
    j.checkpoint = m.to_container();
  });

  const fs::path path = ctx.out_dir / "koopman.csv", history_path = ctx.out_dir / "history.csv";
  std::ofstream out = open_out(path), history_out = open_out(history_path);
  CsvWriter csv(out, {"variant", "n_frequencies", "seed", "frequency_index", "omega_initial", "omega_final",
                      "train_error", "test_error", "best_epoch", "best_test_error", "config_hash"});
  CsvWriter history(history_out, kHistoryHeader);
  for (const Job& j : jobs) {
    for (std::size_t f = 0; f < j.omega.size(); ++f)
      csv.row({std::string(to_string(j.variant)), csv_field(c.n_frequencies), csv_field(j.seed), csv_field(f),
               csv_field(j.omega0[f]), csv_field(j.omega[f]), csv_field(j.report.final_train_error),
               csv_field(j.report.final_test_error), csv_field(j.report.best_epoch),
               csv_field(j.report.best_test_error), ctx.hash});
    write_history(history, j.variant, 2 * c.n_frequencies, j.seed, j.report, ctx.hash);
    if (c.save_checkpoints) {
      fs::create_directories(ctx.out_dir / "checkpoints");
      j.checkpoint.save(ctx.out_dir / "checkpoints" / ("koopman_" + member_name(j.variant, 2 * c.n_frequencies, j.seed) + ".hrc"));
    }
  }
  ctx.summary.files.push_back(path);
  ctx.summary.files.push_back(history_path);
}

void run_surrogate_kind(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const std::vector<std::size_t> ranks = c.ranks.empty() ? std::vector<std::size_t>{c.surrogate.rank} : c.ranks;
  struct Job {
    Variant variant;
    std::size_t rank;
    std::uint64_t seed;
    SurrogateResult result;
  };
  std::vector<Job> jobs;
  for (Variant v : c.variants)
    for (std::size_t r : ranks)
      for (std::uint64_t seed : c.seeds) jobs.push_back({v, r, seed, {}});
  parallel_for(jobs.size(), ctx.options.workers, [&](std::size_t i) {
    Job& j = jobs[i];
    SurrogateConfig sc = c.surrogate;
    sc.rank = j.rank;
    sc.architecture = c.architecture(j.rank);
    sc.standardize = c.dataset.effective_standardize();
    sc.autoencoder_train = c.train;
    j.result = run_surrogate(j.variant, ctx.dataset, ctx.split, sc, j.seed);
  });

  const fs::path path = ctx.out_dir / "surrogate.csv";
  std::ofstream out = open_out(path);
  CsvWriter csv(out, {"variant", "rank", "seed", "trajectory", "parameter", "total_error", "reconstruction_error",
                      "surrogate_error", "config_hash"});
  for (const Job& j : jobs) {
    for (const TrajectoryError& e : j.result.test_trajectories)
      csv.row({std::string(to_string(j.variant)), csv_field(j.rank), csv_field(j.seed), csv_field(e.trajectory),
               csv_field(e.parameter), csv_field(e.total), csv_field(e.reconstruction),
               csv_field(e.total - e.reconstruction), ctx.hash});
    if (c.save_checkpoints) {
      fs::create_directories(ctx.out_dir / "checkpoints");
      const std::string name = member_name(j.variant, j.rank, j.seed);
      j.result.autoencoder_checkpoint.save(ctx.out_dir / "checkpoints" / (name + ".hrc"));
      j.result.lstm_checkpoint.save(ctx.out_dir / "checkpoints" / ("lstm_" + name + ".hrc"));
    }
  }
  ctx.summary.files.push_back(path);
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config, const fs::path& out_dir, const RunOptions& options) {
  config.validate();
  const std::string started = utc_now();
  fs::create_directories(out_dir);
  Context ctx{config, out_dir, options, config.hash(), {}, {}, {}};
  ctx.summary.config_hash = ctx.hash;
  {
    std::ofstream out = open_out(out_dir / "config.json");
    out << config.canonical_json() << '\n';
  }
  log_line(options, "config " + ctx.hash + ", building dataset");
  ctx.dataset = build_dataset(config.dataset);
  ctx.split = build_split(config.dataset, ctx.dataset);

  switch (config.kind) {
    case ExperimentKind::Koopman:
      run_koopman_kind(ctx);
      break;
    case ExperimentKind::Surrogate:
      run_surrogate_kind(ctx);
      break;
    default:
      run_autoencoder_kind(ctx);
      break;
  }

  std::ofstream prov = open_out(out_dir / "provenance.json");
  prov << "{\n  \"config_hash\": \"" << ctx.hash << "\",\n  \"version\": \"" << HROM_VERSION
       << "\",\n  \"started\": \"" << started << "\",\n  \"finished\": \"" << utc_now()
       << "\",\n  \"workers\": " << options.workers << "\n}\n";
  return ctx.summary;
}

GenerateSummary generate_dataset(const DatasetSpec& spec, const fs::path& out_dir) {
  Dataset d = build_dataset(spec);
  fs::create_directories(out_dir);
  GenerateSummary g;
  g.file = out_dir / "dataset.hrc";
  d.save(g.file);
  g.rows = d.rows();
  g.n_cells = d.n_cells;
  g.n_components = d.n_components;
  g.seed = d.seed;
  g.generator = d.generator;
  return g;
}

namespace {

struct Stats {
  std::vector<double> values;
  void add(double v) { values.push_back(v); }
  double mean() const { return mean_std(values).first; }
  double std() const { return mean_std(values).second; }
};

double num(const std::vector<std::string>& row, int col) {
  if (col < 0) throw IoError("missing column");
  const std::string& f = row.at(static_cast<std::size_t>(col));
  try {
    return std::stod(f);
  } catch (const std::exception&) {
    throw IoError("not a number: '" + f + "'");
  }
}

std::string str(const std::vector<std::string>& row, int col) {
  if (col < 0) throw IoError("missing column");
  return row.at(static_cast<std::size_t>(col));
}

CsvTable load_table(const fs::path& p, const std::vector<std::string>& required) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read");
  CsvTable t = read_csv(in);
  for (const std::string& c : required)
    if (t.column(c) < 0) throw IoError("missing column " + c);
  return t;
}

void aggregate_reconstruction(const CsvTable& t, std::map<std::tuple<std::string, std::string, std::string, std::size_t, std::size_t>,
                                                          std::tuple<Stats, Stats, std::size_t>>& groups) {
  const int hash = t.column("config_hash"), kind = t.column("kind"), variant = t.column("variant"),
            grid = t.column("grid"), rank = t.column("rank"), status = t.column("status"),
            train = t.column("train_error"), test = t.column("test_error");
  for (const auto& row : t.rows) {
    auto& g = groups[{str(row, hash), str(row, kind), str(row, variant), static_cast<std::size_t>(num(row, grid)),
                      static_cast<std::size_t>(num(row, rank))}];
    if (str(row, status) != "ok") {
      ++std::get<2>(g);
      continue;
    }
    std::get<0>(g).add(num(row, train));
    std::get<1>(g).add(num(row, test));
  }
}

}  // namespace

ReportSummary report_results(const fs::path& result_dir, const fs::path& out_dir) {
  if (!fs::is_directory(result_dir)) throw IoError("result directory not found: " + result_dir.string());
  ReportSummary summary;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(result_dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::map<std::tuple<std::string, std::string, std::string, std::size_t, std::size_t>, std::tuple<Stats, Stats, std::size_t>> recon;
  std::map<std::tuple<std::string, std::string, std::string, std::size_t, std::size_t, double>, Stats> metrics;
  std::map<std::tuple<std::string, std::string, std::size_t, std::size_t>, std::tuple<Stats, Stats, Stats>> koop;
  std::map<std::tuple<std::string, std::string, std::size_t>, std::tuple<Stats, Stats>> surr;

  for (const fs::path& p : files) {
    const std::string name = p.filename().string();
    if (name.rfind("summary_", 0) == 0 || name == "convergence_rates.csv") continue;
    try {
      if (name == "results.csv") {
        aggregate_reconstruction(load_table(p, {"config_hash", "kind", "variant", "grid", "rank", "status", "train_error", "test_error"}), recon);
      } else if (name == "metrics.csv") {
        CsvTable t = load_table(p, {"metric", "variant", "grid", "rank", "noise_level", "value", "config_hash"});
        for (const auto& row : t.rows)
          metrics[{str(row, t.column("config_hash")), str(row, t.column("metric")), str(row, t.column("variant")),
                   static_cast<std::size_t>(num(row, t.column("grid"))), static_cast<std::size_t>(num(row, t.column("rank"))),
                   num(row, t.column("noise_level"))}]
              .add(num(row, t.column("value")));
      } else if (name == "koopman.csv") {
        CsvTable t = load_table(p, {"variant", "n_frequencies", "frequency_index", "omega_final", "train_error", "test_error", "config_hash"});
        for (const auto& row : t.rows) {
          auto& g = koop[{str(row, t.column("config_hash")), str(row, t.column("variant")),
                          static_cast<std::size_t>(num(row, t.column("n_frequencies"))),
                          static_cast<std::size_t>(num(row, t.column("frequency_index")))}];
          std::get<0>(g).add(num(row, t.column("omega_final")));
          std::get<1>(g).add(num(row, t.column("train_error")));
          std::get<2>(g).add(num(row, t.column("test_error")));
        }
      } else if (name == "surrogate.csv") {
        CsvTable t = load_table(p, {"variant", "rank", "total_error", "reconstruction_error", "config_hash"});
        for (const auto& row : t.rows) {
          auto& g = surr[{str(row, t.column("config_hash")), str(row, t.column("variant")),
                          static_cast<std::size_t>(num(row, t.column("rank")))}];
          std::get<0>(g).add(num(row, t.column("total_error")));
          std::get<1>(g).add(num(row, t.column("reconstruction_error")));
        }
      }
    } catch (const std::exception& e) {
      summary.skipped.push_back(p.string() + ": " + e.what());
    }
  }

  fs::create_directories(out_dir);
  if (!recon.empty()) {
    const fs::path path = out_dir / "summary_reconstruction.csv";
    std::ofstream out = open_out(path);
    CsvWriter csv(out, {"kind", "variant", "grid", "rank", "n_ok", "n_failed", "mean_train", "std_train", "mean_test",
                        "std_test", "log_rank", "log_mean_test", "config_hash"});
    std::map<std::tuple<std::string, std::string, std::string, std::size_t>, std::pair<std::vector<double>, std::vector<double>>> series;
    for (const auto& [key, g] : recon) {
      const auto& [hash, kind, variant, grid, rank] = key;
      const auto& [train, test, failed] = g;
      const bool any = !test.values.empty();
      const double nan = std::nan("");
      const double mt = any ? test.mean() : nan;
      csv.row({kind, variant, csv_field(grid), csv_field(rank), csv_field(test.values.size()), csv_field(failed),
               csv_field(any ? train.mean() : nan), csv_field(any ? train.std() : nan), csv_field(mt),
               csv_field(any ? test.std() : nan), csv_field(std::log(static_cast<double>(rank))),
               csv_field(any && mt > 0.0 ? std::log(mt) : nan), hash});
      if (any && mt > 0.0) {
        auto& s = series[{hash, kind, variant, grid}];
        s.first.push_back(static_cast<double>(rank));
        s.second.push_back(mt);
      }
    }
    summary.files.push_back(path);
    std::vector<std::vector<std::string>> rate_rows;
    for (const auto& [key, s] : series) {
      if (std::set<double>(s.first.begin(), s.first.end()).size() < 3) continue;
      const ConvergenceFit fit = fit_convergence_rate(s.first, s.second);
      const auto& [hash, kind, variant, grid] = key;
      rate_rows.push_back({kind, variant, csv_field(grid), csv_field(s.first.size()), csv_field(fit.q),
                           csv_field(fit.intercept), hash});
    }
    if (!rate_rows.empty()) {
      const fs::path rp = out_dir / "convergence_rates.csv";
      std::ofstream rout = open_out(rp);
      CsvWriter rcsv(rout, {"kind", "variant", "grid", "n_ranks", "q", "intercept", "config_hash"});
      for (const auto& r : rate_rows) rcsv.row(r);
      summary.files.push_back(rp);
    }
  }
  if (!metrics.empty()) {
    const fs::path path = out_dir / "summary_metrics.csv";
    std::ofstream out = open_out(path);
    CsvWriter csv(out, {"metric", "variant", "grid", "rank", "noise_level", "n", "mean", "std", "config_hash"});
    for (const auto& [key, s] : metrics) {
      const auto& [hash, metric, variant, grid, rank, level] = key;
      csv.row({metric, variant, csv_field(grid), csv_field(rank), csv_field(level), csv_field(s.values.size()),
               csv_field(s.mean()), csv_field(s.std()), hash});
    }
    summary.files.push_back(path);
  }
  if (!koop.empty()) {
    const fs::path path = out_dir / "summary_koopman.csv";
    std::ofstream out = open_out(path);
    CsvWriter csv(out, {"variant", "n_frequencies", "frequency_index", "n", "mean_omega", "std_omega", "mean_train",
                        "mean_test", "std_test", "config_hash"});
    for (const auto& [key, g] : koop) {
      const auto& [hash, variant, nf, fi] = key;
      const auto& [omega, train, test] = g;
      csv.row({variant, csv_field(nf), csv_field(fi), csv_field(omega.values.size()), csv_field(omega.mean()),
               csv_field(omega.std()), csv_field(train.mean()), csv_field(test.mean()), csv_field(test.std()), hash});
    }
    summary.files.push_back(path);
  }
  if (!surr.empty()) {
    const fs::path path = out_dir / "summary_surrogate.csv";
    std::ofstream out = open_out(path);
    CsvWriter csv(out, {"variant", "rank", "n", "mean_total", "std_total", "mean_reconstruction",
                        "std_reconstruction", "reconstruction_fraction", "config_hash"});
    for (const auto& [key, g] : surr) {
      const auto& [hash, variant, rank] = key;
      const auto& [total, rec] = g;
      csv.row({variant, csv_field(rank), csv_field(total.values.size()), csv_field(total.mean()), csv_field(total.std()),
               csv_field(rec.mean()), csv_field(rec.std()), csv_field(rec.mean() / total.mean()), hash});
    }
    summary.files.push_back(path);
  }
  return summary;
}

void inspect_file(const fs::path& path, std::ostream& out) {
  const Container c = Container::load(path, false);
  out << "file " << path.string() << '\n';
  out << "kind " << c.kind() << '\n';
  out << "format_version " << c.format_version() << '\n';
  for (const auto& [k, v] : c.meta_entries()) out << "meta " << k << ' ' << v << '\n';
  std::size_t total = 0;
  for (const ContainerTensor& t : c.tensors()) {
    out << "tensor " << t.name << ' ' << t.rows << 'x' << t.cols << ' ' << t.group << '\n';
    total += t.rows * t.cols;
  }
  out << "entries " << total << '\n';
}

}  // namespace hrom
