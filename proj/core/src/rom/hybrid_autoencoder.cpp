#include "hrom/rom/hybrid_autoencoder.hpp"

#include <sstream>

#include "hrom/errors.hpp"

namespace hrom {

namespace {

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s.empty() ? "-" : s;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  if (s == "-" || s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  return out;
}

// x * (1 - w) + y * w with w a 1 x n row, evaluated like the tape does.
DenseMatrix blend(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& w) {
  DenseMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double wj = w.data()[j];
      out(i, j) = x(i, j) * (1.0 - wj) + y(i, j) * wj;
    }
  return out;
}

DenseMatrix tile(const DenseMatrix& row, std::size_t times) {
  DenseMatrix out(1, row.cols() * times);
  for (std::size_t t = 0; t < times; ++t)
    for (std::size_t j = 0; j < row.cols(); ++j) out(0, t * row.cols() + j) = row(0, j);
  return out;
}

}  // namespace

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::Pod: return "pod";
    case Variant::Ae: return "ae";
    case Variant::SimpleHybrid: return "simple";
    case Variant::LearnableWeightedHybrid: return "lwh";
  }
  return "pod";
}

Variant parse_variant(std::string_view name) {
  if (name == "pod" || name == "POD") return Variant::Pod;
  if (name == "ae" || name == "AE" || name == "vanilla_ae") return Variant::Ae;
  if (name == "simple" || name == "simple_hybrid" || name == "SimpleHybrid") return Variant::SimpleHybrid;
  if (name == "lwh" || name == "learnable_weighted_hybrid" || name == "LearnableWeightedHybrid")
    return Variant::LearnableWeightedHybrid;
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

bool uses_pod(Variant v) noexcept { return v != Variant::Ae; }
bool uses_network(Variant v) noexcept { return v != Variant::Pod; }

Architecture Architecture::ks_default(std::size_t rank) {
  Architecture a;
  a.encoder_hidden = {2 * rank};
  a.decoder_hidden = {2 * rank};
  a.activation = Activation::Tanh;
  return a;
}

std::vector<std::size_t> Architecture::decoder_layers() const {
  if (!decoder_hidden.empty()) return decoder_hidden;
  return {encoder_hidden.rbegin(), encoder_hidden.rend()};
}

HybridAutoencoder::HybridAutoencoder(ModelSpec spec, std::optional<PodBasis> pod, Standardization stats)
    : spec_(std::move(spec)), pod_(std::move(pod)), stats_(std::move(stats)) {
  const std::size_t f = n_features();
  if (spec_.rank == 0) throw ConfigError("model: rank must be positive");
  if (f == 0) throw ConfigError("model: n_cells and n_components must be positive");
  if (stats_.n_features() != f) throw ConfigError("model: standardization does not match the feature count");
  if (uses_pod(spec_.variant)) {
    if (!pod_) throw ConfigError("model: variant '" + std::string(to_string(spec_.variant)) + "' needs a POD basis");
    if (pod_->n_features() != f || pod_->rank() != spec_.rank)
      throw ConfigError("model: POD basis shape does not match rank and feature count");
  } else {
    pod_.reset();
  }
  if (uses_network(spec_.variant)) {
    const auto& arch = spec_.architecture;
    if (!spec_.decoder_only) {
      std::vector<std::size_t> enc{f};
      enc.insert(enc.end(), arch.encoder_hidden.begin(), arch.encoder_hidden.end());
      enc.push_back(spec_.rank);
      encoder_ = Mlp::create(params_, "encoder", enc, arch.activation);
    }
    std::vector<std::size_t> dec{spec_.rank};
    const auto hidden = arch.decoder_layers();
    dec.insert(dec.end(), hidden.begin(), hidden.end());
    dec.push_back(f);
    decoder_ = Mlp::create(params_, "decoder", dec, arch.activation);
  }
  if (spec_.variant == Variant::LearnableWeightedHybrid) {
    if (!spec_.decoder_only) a_slot_ = params_.add("a", DenseMatrix(1, spec_.rank), ParamGroup::Blend);
    b_slot_ = params_.add("b", DenseMatrix(1, spec_.n_components), ParamGroup::Blend);
  }
}

void HybridAutoencoder::initialize(RandomStream& stream) {
  encoder_.kaiming_init(params_, stream);
  decoder_.kaiming_init(params_, stream);
  if (a_slot_) params_[*a_slot_].value.fill(0.0);
  if (b_slot_) params_[*b_slot_].value.fill(0.0);
}

void HybridAutoencoder::require_features(std::size_t cols, const char* what) const {
  if (cols != n_features())
    throw ValidationError(std::string(what) + ": expected " + std::to_string(n_features()) + " features, got " +
                          std::to_string(cols));
}

void HybridAutoencoder::require_latent(std::size_t cols, const char* what) const {
  if (cols != rank())
    throw ValidationError(std::string(what) + ": expected latent size " + std::to_string(rank()) + ", got " +
                          std::to_string(cols));
}

BlendParts HybridAutoencoder::encode_parts(const DenseMatrix& x) const {
  require_features(x.cols(), "encode");
  if (spec_.decoder_only) throw StateError("encode: decoder-only model has no encoder");
  BlendParts p;
  if (pod_) p.pod = pod_->encode(x);
  if (uses_network(spec_.variant)) p.nn = encoder_.forward(params_, x);
  return p;
}

BlendParts HybridAutoencoder::decode_parts(const DenseMatrix& z) const {
  require_latent(z.cols(), "decode");
  BlendParts p;
  if (pod_) p.pod = pod_->decode(z);
  if (uses_network(spec_.variant)) p.nn = decoder_.forward(params_, z);
  return p;
}

DenseMatrix HybridAutoencoder::encode(const DenseMatrix& x) const {
  BlendParts p = encode_parts(x);
  switch (spec_.variant) {
    case Variant::Pod: return p.pod;
    case Variant::Ae: return p.nn;
    case Variant::SimpleHybrid: return p.pod + p.nn;
    case Variant::LearnableWeightedHybrid: return blend(p.pod, p.nn, params_[*a_slot_].value);
  }
  return p.pod;
}

DenseMatrix HybridAutoencoder::decode(const DenseMatrix& z) const {
  BlendParts p = decode_parts(z);
  switch (spec_.variant) {
    case Variant::Pod: return p.pod;
    case Variant::Ae: return p.nn;
    case Variant::SimpleHybrid: return p.pod + p.nn;
    case Variant::LearnableWeightedHybrid:
      return blend(p.pod, p.nn, tile(params_[*b_slot_].value, spec_.n_cells));
  }
  return p.pod;
}

Tape::Var HybridAutoencoder::encode(Tape& tape, Tape::Var x) const {
  require_features(tape.value(x).cols(), "encode");
  if (spec_.decoder_only) throw StateError("encode: decoder-only model has no encoder");
  const auto pod = [&] { return tape.matmul(x, tape.constant_ref(pod_->ur)); };
  const auto nn = [&] { return encoder_.forward(tape, params_, x); };
  switch (spec_.variant) {
    case Variant::Pod: return pod();
    case Variant::Ae: return nn();
    case Variant::SimpleHybrid: return tape.add(pod(), nn());
    case Variant::LearnableWeightedHybrid: {
      const auto a = tape.parameter(params_, *a_slot_);
      return tape.add(tape.mul_row(pod(), tape.one_minus(a)), tape.mul_row(nn(), a));
    }
  }
  return pod();
}

Tape::Var HybridAutoencoder::decode(Tape& tape, Tape::Var z) const {
  require_latent(tape.value(z).cols(), "decode");
  // z U^T, with U^T stored once per call on the tape
  const auto pod = [&] { return tape.matmul(z, tape.input(pod_->ur.transpose())); };
  const auto nn = [&] { return decoder_.forward(tape, params_, z); };
  switch (spec_.variant) {
    case Variant::Pod: return pod();
    case Variant::Ae: return nn();
    case Variant::SimpleHybrid: return tape.add(pod(), nn());
    case Variant::LearnableWeightedHybrid: {
      const auto b = tape.repeat_cols(tape.parameter(params_, *b_slot_), spec_.n_cells);
      return tape.add(tape.mul_row(pod(), tape.one_minus(b)), tape.mul_row(nn(), b));
    }
  }
  return pod();
}

std::size_t HybridAutoencoder::parameter_count() const noexcept {
  return params_.parameter_count() + (pod_ ? pod_->ur.size() : 0);
}

Container HybridAutoencoder::to_container() const {
  Container c("model");
  c.set_meta("variant", std::string(to_string(spec_.variant)));
  c.set_meta("rank", std::to_string(spec_.rank));
  c.set_meta("n_cells", std::to_string(spec_.n_cells));
  c.set_meta("n_components", std::to_string(spec_.n_components));
  c.set_meta("decoder_only", spec_.decoder_only ? "1" : "0");
  c.set_meta("activation", std::string(to_string(spec_.architecture.activation)));
  c.set_meta("encoder_hidden", join_sizes(spec_.architecture.encoder_hidden));
  c.set_meta("decoder_hidden", join_sizes(spec_.architecture.decoder_layers()));
  c.set_meta("trainable_parameters", std::to_string(trainable_parameter_count()));
  c.set_meta("parameters", std::to_string(parameter_count()));
  for (const Tensor& t : params_) c.add_tensor(t.name, t.value, std::string(to_string(t.group)));
  if (pod_) {
    c.add_tensor("pod.ur", pod_->ur, "pod");
    c.add_tensor("pod.singular_values", DenseMatrix::row_vector(pod_->singular_values), "pod");
  }
  c.add_tensor("stats.mean", stats_.mean, "stats");
  c.add_tensor("stats.scale", stats_.scale, "stats");
  return c;
}

HybridAutoencoder HybridAutoencoder::from_container(const Container& c) {
  if (c.kind() != "model") throw IoError("expected a model container, found kind '" + c.kind() + "'");
  ModelSpec spec;
  spec.variant = parse_variant(c.meta("variant"));
  spec.rank = std::stoull(c.meta("rank"));
  spec.n_cells = std::stoull(c.meta("n_cells"));
  spec.n_components = std::stoull(c.meta("n_components"));
  spec.decoder_only = c.meta("decoder_only") == "1";
  spec.architecture.activation = parse_activation(c.meta("activation"));
  spec.architecture.encoder_hidden = parse_sizes(c.meta("encoder_hidden"));
  spec.architecture.decoder_hidden = parse_sizes(c.meta("decoder_hidden"));
  Standardization stats{c.tensor("stats.mean"), c.tensor("stats.scale")};
  std::optional<PodBasis> pod;
  if (c.find_tensor("pod.ur")) {
    PodBasis p;
    p.ur = c.tensor("pod.ur");
    p.singular_values = c.tensor("pod.singular_values").values();
    p.stats = stats;
    pod = std::move(p);
  }
  HybridAutoencoder m(spec, std::move(pod), std::move(stats));
  for (const ContainerTensor& t : c.tensors()) {
    if (t.group == "pod" || t.group == "stats") continue;
    const ParamGroup group = parse_param_group(t.group);
    if (auto slot = m.params_.find(t.name)) {
      Tensor& dst = m.params_[*slot];
      if (dst.value.rows() != t.rows || dst.value.cols() != t.cols)
        throw IoError("checkpoint tensor '" + t.name + "' has the wrong shape");
      dst.value = t.value;
      dst.group = group;
    } else {
      m.params_.add(t.name, t.value, group);
    }
  }
  return m;
}

HybridAutoencoder HybridAutoencoder::clone() const { return from_container(to_container()); }

HybridAutoencoder build_model(const ModelSpec& spec, const std::optional<PodBasis>& pod,
                              const Standardization& stats, RandomStream& stream) {
  HybridAutoencoder m(spec, uses_pod(spec.variant) ? pod : std::nullopt, stats);
  m.initialize(stream);
  return m;
}

HybridAutoencoder build_model(Variant variant, const SnapshotMatrix& data, std::size_t rank,
                              const Architecture& architecture, RandomStream& stream) {
  ModelSpec spec;
  spec.variant = variant;
  spec.rank = rank;
  spec.n_cells = data.n_cells;
  spec.n_components = data.n_components;
  spec.architecture = architecture;
  std::optional<PodBasis> pod;
  if (uses_pod(variant)) pod = compute_pod(data, rank);
  return build_model(spec, pod, data.stats, stream);
}

}  // namespace hrom
