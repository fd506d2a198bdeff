#include "hrom/experiment/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hrom/errors.hpp"

namespace hrom {

using json = nlohmann::json;

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKinds[] = {
    {ExperimentKind::Reconstruction, "reconstruction"}, {ExperimentKind::Koopman, "koopman"},
    {ExperimentKind::Surrogate, "surrogate"},           {ExperimentKind::Sharpness, "sharpness"},
    {ExperimentKind::Noise, "noise"},                   {ExperimentKind::Contribution, "contribution"},
    {ExperimentKind::Similarity, "similarity"},
};

// Typed access to one JSON object; remembers which keys were read so the
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ValidationError(field(key) + ": " + what);
  }

  std::string field(const std::string& key) const {
    if (path_.empty()) return key.empty() ? "<root>" : key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  void read(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) out = as_size(*v, key);
  }
  void read(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      out = v->get<int>();
    }
  }
  void read(const std::string& key, double& out) {
    if (const json* v = find(key)) out = as_double(*v, key);
  }
  void read(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }
  void read(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }
  void read(const std::string& key, std::vector<std::size_t>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "expected a list of non-negative integers");
      out.clear();
      for (const json& e : *v) out.push_back(as_size(e, key));
    }
  }
  void read(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "expected a list of numbers");
      out.clear();
      for (const json& e : *v) out.push_back(as_double(e, key));
    }
  }
  void read(const std::string& key, std::vector<std::string>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "expected a list of strings");
      out.clear();
      for (const json& e : *v) {
        if (!e.is_string()) fail(key, "expected a list of strings");
        out.push_back(e.get<std::string>());
      }
    }
  }

  std::optional<Section> sub(const std::string& key) {
    if (const json* v = find(key)) return Section(*v, field(key));
    return std::nullopt;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(it.key(), "unknown key");
  }

 private:
  std::size_t as_size(const json& v, const std::string& key) const {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      fail(key, "expected a non-negative integer");
    return v.get<std::size_t>();
  }
  double as_double(const json& v, const std::string& key) const {
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "expected a finite number");
    return d;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
}

void read_dataset(Section s, DatasetSpec& d) {
  s.read("generator", d.generator);
  s.read("path", d.path);
  if (auto ks = s.sub("ks")) {
    ks->read("length", d.ks.length);
    ks->read("n", d.ks.n);
    ks->read("dt", d.ks.dt);
    ks->read("n_steps", d.ks.n_steps);
    ks->read("transient_skip", d.ks.transient_skip);
    ks->read("save_every", d.ks.save_every);
    ks->read("n_modes", d.ks.n_modes);
    ks->read("max_wavenumber", d.ks.max_wavenumber);
    ks->read("seed", d.ks.seed);
    ks->finish();
  }
  if (auto b = s.sub("burgers")) {
    b->read("nx", d.burgers.nx);
    b->read("nt", d.burgers.nt);
    b->read("terminal_time", d.burgers.terminal_time);
    b->read("length", d.burgers.length);
    b->read("train_re", d.train_re);
    b->read("test_re", d.test_re);
    b->finish();
  }
  if (auto w = s.sub("wave")) {
    w->read("nx", d.wave.nx);
    w->read("n_steps", d.wave.n_steps);
    w->read("variance", d.wave.variance);
    w->read("omega", d.wave.omega);
    w->finish();
  }
  if (auto sp = s.sub("split")) {
    sp->read("policy", d.split);
    sp->read("ratio", d.ratio);
    sp->read("seed", d.split_seed);
    sp->read("fraction", d.fraction);
    sp->finish();
  }
  if (const json* v = s.find("standardize")) {
    if (!v->is_boolean()) s.fail("standardize", "expected true or false");
    d.standardize = v->get<bool>() ? 1 : 0;
  }
  s.finish();
}

void read_train(Section s, TrainConfig& t) {
  s.read("epochs", t.epochs);
  s.read("batch_size", t.batch_size);
  s.read("shuffle", t.shuffle);
  s.read("eval_interval", t.eval_interval);
  s.read("max_batches_per_epoch", t.max_batches_per_epoch);
  s.read("weight_decay", t.weight_decay);
  s.read("clip_norm", t.clip_norm);
  s.read("beta1", t.adam.beta1);
  s.read("beta2", t.adam.beta2);
  s.read("epsilon", t.adam.epsilon);
  if (auto lr = s.sub("lr")) {
    for (ParamGroup g : {ParamGroup::Network, ParamGroup::Blend, ParamGroup::Frequency}) {
      double v = t.adam.group_lr(g);
      lr->read(std::string(to_string(g)), v);
      t.adam.set_group_lr(g, v);
    }
    lr->finish();
  }
  if (auto sc = s.sub("schedule")) {
    std::string kind = t.schedule.kind == LrSchedule::Kind::Cyclic ? "cyclic" : "constant";
    sc->read("kind", kind);
    if (kind == "cyclic")
      t.schedule.kind = LrSchedule::Kind::Cyclic;
    else if (kind == "constant")
      t.schedule.kind = LrSchedule::Kind::Constant;
    else
      sc->fail("kind", "expected \"constant\" or \"cyclic\"");
    sc->read("low_fraction", t.schedule.low_fraction);
    sc->read("period", t.schedule.period);
    sc->finish();
  }
  s.finish();
}

json train_json(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"shuffle", t.shuffle},
          {"eval_interval", t.eval_interval},
          {"max_batches_per_epoch", t.max_batches_per_epoch},
          {"weight_decay", t.weight_decay},
          {"clip_norm", t.clip_norm},
          {"beta1", t.adam.beta1},
          {"beta2", t.adam.beta2},
          {"epsilon", t.adam.epsilon},
          {"lr",
           {{"network", t.adam.group_lr(ParamGroup::Network)},
            {"blend", t.adam.group_lr(ParamGroup::Blend)},
            {"frequency", t.adam.group_lr(ParamGroup::Frequency)}}},
          {"schedule",
           {{"kind", t.schedule.kind == LrSchedule::Kind::Cyclic ? "cyclic" : "constant"},
            {"low_fraction", t.schedule.low_fraction},
            {"period", t.schedule.period}}}};
}

json dataset_json(const DatasetSpec& d) {
  json j{{"generator", d.effective_generator()},
         {"path", d.path},
         {"split",
          {{"policy", d.effective_split()}, {"ratio", d.ratio}, {"seed", d.split_seed}, {"fraction", d.fraction}}},
         {"standardize", d.effective_standardize()}};
  const std::string g = d.effective_generator();
  if (g == "ks")
    j["ks"] = {{"length", d.ks.length},     {"n", d.ks.n},
               {"dt", d.ks.dt},             {"n_steps", d.ks.n_steps},
               {"transient_skip", d.ks.transient_skip}, {"save_every", d.ks.save_every},
               {"n_modes", d.ks.n_modes},   {"max_wavenumber", d.ks.max_wavenumber},
               {"seed", d.ks.seed}};
  if (g == "burgers")
    j["burgers"] = {{"nx", d.burgers.nx},
                    {"nt", d.burgers.nt},
                    {"terminal_time", d.burgers.terminal_time},
                    {"length", d.burgers.length},
                    {"train_re", d.train_re},
                    {"test_re", d.test_re}};
  if (g == "wave")
    j["wave"] = {{"nx", d.wave.nx}, {"n_steps", d.wave.n_steps}, {"variance", d.wave.variance}, {"omega", d.wave.omega}};
  return j;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  for (const auto& [k, name] : kKinds)
    if (k == kind) return name;
  return "reconstruction";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (const auto& [k, n] : kKinds)
    if (n == name) return k;
  throw ValidationError("kind: unknown experiment kind '" + std::string(name) + "'");
}

std::string DatasetSpec::effective_generator() const {
  if (!path.empty()) return "file";
  return generator;
}

std::string DatasetSpec::effective_split() const {
  if (!split.empty()) return split;
  if (generator == "wave") return "time";
  if (generator == "burgers") return "parameter";
  return "shuffled";
}

bool DatasetSpec::effective_standardize() const {
  if (standardize >= 0) return standardize == 1;
  return generator != "burgers";
}

Architecture ExperimentConfig::architecture(std::size_t rank) const {
  if (!custom_architecture) return Architecture::ks_default(rank);
  Architecture a = Architecture::ks_default(rank);
  a.encoder_hidden = encoder_hidden;
  a.decoder_hidden = decoder_hidden;
  return a;
}

void ExperimentConfig::validate() const {
  auto wrap = [](const char* field, auto&& f) {
    try {
      f();
    } catch (const ConfigError& e) {
      throw ValidationError(std::string(field) + ": " + e.what());
    }
  };
  const std::string g = dataset.effective_generator();
  if (g != "ks" && g != "burgers" && g != "wave" && g != "file")
    throw ValidationError("dataset.generator: expected \"ks\", \"burgers\" or \"wave\"");
  const std::string sp = dataset.effective_split();
  if (sp != "shuffled" && sp != "time" && sp != "parameter")
    throw ValidationError("dataset.split.policy: expected \"shuffled\", \"time\" or \"parameter\"");
  if (!(dataset.ratio > 0.0 && dataset.ratio < 1.0)) throw ValidationError("dataset.split.ratio: must lie in (0, 1)");
  if (!(dataset.fraction > 0.0 && dataset.fraction < 1.0))
    throw ValidationError("dataset.split.fraction: must lie in (0, 1)");
  if (g == "ks") wrap("dataset.ks", [&] { dataset.ks.validate(); });
  if (g == "burgers") {
    wrap("dataset.burgers", [&] { dataset.burgers.validate(); });
    if (dataset.train_re.empty() || dataset.test_re.empty())
      throw ValidationError("dataset.burgers: train_re and test_re must not be empty");
  }
  if (g == "wave") wrap("dataset.wave", [&] { dataset.wave.validate(); });

  if (seeds.empty()) throw ValidationError("seeds: must not be empty");
  if (variants.empty()) throw ValidationError("variants: must not be empty");
  const bool needs_ranks = kind != ExperimentKind::Koopman && kind != ExperimentKind::Surrogate;
  if (needs_ranks && ranks.empty()) throw ValidationError("ranks: must not be empty for kind " + std::string(to_string(kind)));
  for (std::size_t r : ranks)
    if (r == 0) throw ValidationError("ranks: entries must be positive");
  wrap("train", [&] { train.validate(); });
  if (kind == ExperimentKind::Sharpness || std::count(extra_metrics.begin(), extra_metrics.end(), ExperimentKind::Sharpness))
    wrap("sharpness", [&] { sharpness.validate(); });
  for (double l : noise_levels)
    if (!(l >= 0.0)) throw ValidationError("noise.levels: entries must be >= 0");
  for (ExperimentKind k : extra_metrics)
    if (k == ExperimentKind::Reconstruction || k == ExperimentKind::Koopman || k == ExperimentKind::Surrogate)
      throw ValidationError("metrics: only sharpness, noise, contribution and similarity can be added");
  if (kind == ExperimentKind::Koopman && n_frequencies == 0)
    throw ValidationError("koopman.n_frequencies: must be positive");
  if (kind == ExperimentKind::Koopman && !(koopman_dt > 0.0)) throw ValidationError("koopman.dt: must be positive");
  if (kind == ExperimentKind::Surrogate) {
    if (g != "burgers" && g != "file") throw ValidationError("dataset.generator: surrogate runs need trajectories (burgers)");
    wrap("surrogate", [&] { surrogate.validate(); });
  }
}

DatasetSpec ExperimentConfig::parse_dataset(std::string_view json_text) {
  const json j = parse_text(json_text);
  DatasetSpec d;
  if (j.is_object() && j.contains("dataset"))
    read_dataset(Section(j.at("dataset"), "dataset"), d);
  else
    read_dataset(Section(j, "dataset"), d);
  return d;
}

ExperimentConfig ExperimentConfig::parse(std::string_view json_text) {
  const json j = parse_text(json_text);
  Section root(j, "");
  ExperimentConfig c;
  std::string kind;
  root.read("kind", kind);
  if (kind.empty()) root.fail("kind", "required");
  c.kind = parse_experiment_kind(kind);

  if (auto d = root.sub("dataset"))
    read_dataset(*d, c.dataset);
  else
    root.fail("dataset", "required");

  std::vector<std::string> names;
  root.read("variants", names);
  if (root.find("variants")) {
    c.variants.clear();
    for (const std::string& n : names) {
      try {
        c.variants.push_back(parse_variant(n));
      } catch (const Error&) {
        root.fail("variants", "unknown variant '" + n + "'");
      }
    }
  }
  root.read("ranks", c.ranks);
  if (const json* s = root.find("seeds")) {
    if (!s->is_array()) root.fail("seeds", "expected a list of non-negative integers");
    c.seeds.clear();
    for (const json& e : *s) {
      if (!e.is_number_unsigned()) root.fail("seeds", "expected a list of non-negative integers");
      c.seeds.push_back(e.get<std::uint64_t>());
    }
  }
  if (auto a = root.sub("architecture")) {
    c.custom_architecture = true;
    a->read("encoder_hidden", c.encoder_hidden);
    a->read("decoder_hidden", c.decoder_hidden);
    a->finish();
  }
  if (auto t = root.sub("train")) read_train(*t, c.train);
  if (auto s = root.sub("sharpness")) {
    s->read("rho", c.sharpness.rho);
    s->read("n_directions", c.sharpness.n_directions);
    s->read("n_ascent_steps", c.sharpness.n_ascent_steps);
    s->read("seed", c.sharpness.seed);
    s->read("max_samples", c.sharpness.max_samples);
    s->finish();
  }
  if (auto n = root.sub("noise")) {
    n->read("levels", c.noise_levels);
    n->finish();
  }
  std::vector<std::string> metrics;
  root.read("metrics", metrics);
  for (const std::string& m : metrics) {
    try {
      c.extra_metrics.push_back(parse_experiment_kind(m));
    } catch (const ValidationError&) {
      root.fail("metrics", "unknown metric '" + m + "'");
    }
  }
  if (auto k = root.sub("koopman")) {
    k->read("n_frequencies", c.n_frequencies);
    k->read("dt", c.koopman_dt);
    k->finish();
  }
  if (auto s = root.sub("surrogate")) {
    s->read("window", c.surrogate.window);
    s->read("lstm_hidden", c.surrogate.lstm_hidden);
    s->read("augment_parameter", c.surrogate.augment_parameter);
    if (auto t = s->sub("lstm_train")) read_train(*t, c.surrogate.lstm_train);
    s->finish();
  }
  root.read("save_checkpoints", c.save_checkpoints);
  root.finish();
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ExperimentConfig::apply_seed_offset(std::uint64_t k) {
  for (std::uint64_t& s : seeds) s += k;
}

std::string ExperimentConfig::canonical_json() const {
  json variants_j = json::array();
  for (Variant v : variants) variants_j.push_back(std::string(to_string(v)));
  json metrics_j = json::array();
  for (ExperimentKind k : extra_metrics) metrics_j.push_back(std::string(to_string(k)));
  json j{{"kind", std::string(to_string(kind))},
         {"dataset", dataset_json(dataset)},
         {"variants", variants_j},
         {"ranks", ranks},
         {"seeds", seeds},
         {"train", train_json(train)},
         {"metrics", metrics_j},
         {"save_checkpoints", save_checkpoints}};
  if (custom_architecture) j["architecture"] = {{"encoder_hidden", encoder_hidden}, {"decoder_hidden", decoder_hidden}};
  auto wants = [&](ExperimentKind k) {
    return kind == k || std::count(extra_metrics.begin(), extra_metrics.end(), k) > 0;
  };
  if (wants(ExperimentKind::Sharpness))
    j["sharpness"] = {{"rho", sharpness.rho},
                      {"n_directions", sharpness.n_directions},
                      {"n_ascent_steps", sharpness.n_ascent_steps},
                      {"seed", sharpness.seed},
                      {"max_samples", sharpness.max_samples}};
  if (wants(ExperimentKind::Noise)) j["noise"] = {{"levels", noise_levels}};
  if (kind == ExperimentKind::Koopman) j["koopman"] = {{"n_frequencies", n_frequencies}, {"dt", koopman_dt}};
  if (kind == ExperimentKind::Surrogate)
    j["surrogate"] = {{"window", surrogate.window},
                      {"lstm_hidden", surrogate.lstm_hidden},
                      {"augment_parameter", surrogate.augment_parameter},
                      {"lstm_train", train_json(surrogate.lstm_train)}};
  return j.dump();
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentConfig::hash() const { return fnv1a64_hex(canonical_json()); }

Dataset build_dataset(const DatasetSpec& spec) {
  if (!spec.path.empty()) return Dataset::load(spec.path);
  if (spec.generator == "ks") return make_ks_dataset(spec.ks);
  if (spec.generator == "wave") return make_wave_dataset(spec.wave);
  if (spec.generator == "burgers") {
    std::vector<double> all = spec.train_re;
    all.insert(all.end(), spec.test_re.begin(), spec.test_re.end());
    return make_burgers_dataset(spec.burgers, all);
  }
  throw ValidationError("dataset.generator: unknown generator '" + spec.generator + "'");
}

Split build_split(const DatasetSpec& spec, const Dataset& dataset) {
  const std::string p = spec.effective_split();
  if (p == "shuffled") return split_shuffled(dataset.rows(), spec.ratio, spec.split_seed);
  if (p == "time") return split_by_time(dataset.rows(), spec.fraction);
  if (p == "parameter") return split_by_parameter(dataset, spec.train_re, spec.test_re);
  throw ValidationError("dataset.split.policy: unknown policy '" + p + "'");
}

}  // namespace hrom
