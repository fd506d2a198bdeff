#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hrom/neural/param_store.hpp"
#include "hrom/neural/tape.hpp"
#include "hrom/numerics/random.hpp"

namespace hrom {

enum class Activation { Tanh, Silu, Linear };

std::string_view to_string(Activation act) noexcept;
Activation parse_activation(std::string_view name);

/// Fully connected network y = act(x W + b) per layer, batch as rows.
///
/// Parameters live in a ParamStore as "<prefix>.W<i>" (fan_in x fan_out) and
/// "<prefix>.b<i>" (1 x fan_out). The last layer is always linear.
class Mlp {
 public:
  struct Layer {
    std::size_t weight_slot = 0;
    std::size_t bias_slot = 0;
    std::size_t fan_in = 0;
    std::size_t fan_out = 0;
    Activation activation = Activation::Linear;
  };

  Mlp() = default;

  /// Adds zero-valued tensors for `sizes` = {in, hidden..., out} to `store`.
  static Mlp create(ParamStore& store, const std::string& prefix, const std::vector<std::size_t>& sizes,
                    Activation hidden, ParamGroup group = ParamGroup::Network);

  Tape::Var forward(Tape& tape, const ParamStore& store, Tape::Var x) const;
  /// Straight evaluation without recording.
  DenseMatrix forward(const ParamStore& store, const DenseMatrix& x) const;

  /// Weights ~ N(0, 2/fan_in), biases 0.
  void kaiming_init(ParamStore& store, RandomStream& stream) const;

  std::size_t input_size() const noexcept { return layers_.empty() ? 0 : layers_.front().fan_in; }
  std::size_t output_size() const noexcept { return layers_.empty() ? 0 : layers_.back().fan_out; }
  std::size_t parameter_count() const noexcept;
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  bool empty() const noexcept { return layers_.empty(); }

 private:
  std::vector<Layer> layers_;
};

}  // namespace hrom
