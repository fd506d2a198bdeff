#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrom/data/dataset.hpp"
#include "hrom/neural/container.hpp"
#include "hrom/neural/mlp.hpp"
#include "hrom/neural/param_store.hpp"
#include "hrom/neural/tape.hpp"
#include "hrom/numerics/random.hpp"
#include "hrom/rom/pod.hpp"

namespace hrom {

enum class Variant { Pod, Ae, SimpleHybrid, LearnableWeightedHybrid };

std::string_view to_string(Variant v) noexcept;
/// Accepts "pod", "ae", "simple", "lwh" and the long names.
Variant parse_variant(std::string_view name);
bool uses_pod(Variant v) noexcept;
bool uses_network(Variant v) noexcept;

/// Hidden layer widths of the encoder and decoder networks. An empty decoder
/// list mirrors the encoder.
struct Architecture {
  std::vector<std::size_t> encoder_hidden;
  std::vector<std::size_t> decoder_hidden;
  Activation activation = Activation::Tanh;

  /// One hidden layer of 2r tanh units each way.
  static Architecture ks_default(std::size_t rank);
  std::vector<std::size_t> decoder_layers() const;
};

struct ModelSpec {
  Variant variant = Variant::LearnableWeightedHybrid;
  std::size_t rank = 0;
  std::size_t n_cells = 0;
  std::size_t n_components = 1;
  Architecture architecture;
  /// No encoder and no a: the latent state is supplied from outside (Koopman).
  bool decoder_only = false;
};

/// POD and network halves of an encoding or decoding, before blending.
struct BlendParts {
  DenseMatrix pod;
  DenseMatrix nn;
};

/// z = (1-a) phi_POD(x) + a phi_NN(x),  x_hat = psi_POD(z) (1-b) + psi_NN(z) b,
/// with the usual reductions for the POD, AE and simple hybrid variants.
/// b has one entry per component and is repeated over cells.
class HybridAutoencoder {
 public:
  HybridAutoencoder(ModelSpec spec, std::optional<PodBasis> pod, Standardization stats);
  HybridAutoencoder(const HybridAutoencoder&) = delete;
  HybridAutoencoder& operator=(const HybridAutoencoder&) = delete;
  HybridAutoencoder(HybridAutoencoder&&) = default;
  HybridAutoencoder& operator=(HybridAutoencoder&&) = default;

  const ModelSpec& spec() const noexcept { return spec_; }
  Variant variant() const noexcept { return spec_.variant; }
  std::size_t rank() const noexcept { return spec_.rank; }
  std::size_t n_features() const noexcept { return spec_.n_cells * spec_.n_components; }
  const std::optional<PodBasis>& pod() const noexcept { return pod_; }
  const Standardization& stats() const noexcept { return stats_; }
  const Mlp& encoder() const noexcept { return encoder_; }
  const Mlp& decoder() const noexcept { return decoder_; }

  ParamStore& params() noexcept { return params_; }
  const ParamStore& params() const noexcept { return params_; }
  std::optional<std::size_t> a_slot() const noexcept { return a_slot_; }
  std::optional<std::size_t> b_slot() const noexcept { return b_slot_; }

  /// Weights ~ N(0, 2/fan_in), biases 0, a = b = 0.
  void initialize(RandomStream& stream);

  DenseMatrix encode(const DenseMatrix& x) const;
  DenseMatrix decode(const DenseMatrix& z) const;
  DenseMatrix reconstruct(const DenseMatrix& x) const { return decode(encode(x)); }
  BlendParts encode_parts(const DenseMatrix& x) const;
  BlendParts decode_parts(const DenseMatrix& z) const;

  Tape::Var encode(Tape& tape, Tape::Var x) const;
  Tape::Var decode(Tape& tape, Tape::Var z) const;
  Tape::Var reconstruct(Tape& tape, Tape::Var x) const { return decode(tape, encode(tape, x)); }

  std::size_t trainable_parameter_count() const noexcept { return params_.parameter_count(); }
  /// Trainable parameters plus the frozen POD basis entries.
  std::size_t parameter_count() const noexcept;

  Container to_container() const;
  static HybridAutoencoder from_container(const Container& c);
  HybridAutoencoder clone() const;

 private:
  void require_features(std::size_t cols, const char* what) const;
  void require_latent(std::size_t cols, const char* what) const;

  ModelSpec spec_;
  std::optional<PodBasis> pod_;
  Standardization stats_;
  ParamStore params_;
  Mlp encoder_;
  Mlp decoder_;
  std::optional<std::size_t> a_slot_;
  std::optional<std::size_t> b_slot_;
};

/// Builds and initializes a model. `pod` is required for every variant but AE.
HybridAutoencoder build_model(const ModelSpec& spec, const std::optional<PodBasis>& pod,
                              const Standardization& stats, RandomStream& stream);
/// Computes the POD basis of the training split as needed.
HybridAutoencoder build_model(Variant variant, const SnapshotMatrix& data, std::size_t rank,
                              const Architecture& architecture, RandomStream& stream);

}  // namespace hrom
