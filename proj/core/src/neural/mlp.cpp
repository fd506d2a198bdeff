#include "hrom/neural/mlp.hpp"

#include <cmath>

#include "hrom/errors.hpp"

namespace hrom {

namespace {

// Same evaluation order as the tape's silu so both paths agree bitwise.
double silu(double v) {
  if (v >= 0.0) return v * (1.0 / (1.0 + std::exp(-v)));
  const double e = std::exp(v);
  return v * (e / (1.0 + e));
}

}  // namespace

std::string_view to_string(Activation act) noexcept {
  switch (act) {
    case Activation::Tanh: return "tanh";
    case Activation::Silu: return "silu";
    case Activation::Linear: return "linear";
  }
  return "linear";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "silu" || name == "swish") return Activation::Silu;
  if (name == "linear") return Activation::Linear;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

Mlp Mlp::create(ParamStore& store, const std::string& prefix, const std::vector<std::size_t>& sizes,
                Activation hidden, ParamGroup group) {
  if (sizes.size() < 2) throw ConfigError("Mlp '" + prefix + "': need at least input and output sizes");
  for (std::size_t s : sizes)
    if (s == 0) throw ConfigError("Mlp '" + prefix + "': layer sizes must be positive");
  Mlp net;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    Layer layer;
    layer.fan_in = sizes[i];
    layer.fan_out = sizes[i + 1];
    layer.activation = (i + 2 == sizes.size()) ? Activation::Linear : hidden;
    layer.weight_slot = store.add(prefix + ".W" + std::to_string(i), DenseMatrix(sizes[i], sizes[i + 1]), group);
    layer.bias_slot = store.add(prefix + ".b" + std::to_string(i), DenseMatrix(1, sizes[i + 1]), group);
    net.layers_.push_back(layer);
  }
  return net;
}

Tape::Var Mlp::forward(Tape& tape, const ParamStore& store, Tape::Var x) const {
  if (tape.value(x).cols() != input_size())
    throw ValidationError("Mlp: input has " + std::to_string(tape.value(x).cols()) + " columns, expected " +
                          std::to_string(input_size()));
  Tape::Var h = x;
  for (const Layer& layer : layers_) {
    h = tape.matmul(h, tape.parameter(store, layer.weight_slot));
    h = tape.add_row(h, tape.parameter(store, layer.bias_slot));
    switch (layer.activation) {
      case Activation::Tanh: h = tape.tanh(h); break;
      case Activation::Silu: h = tape.silu(h); break;
      case Activation::Linear: break;
    }
  }
  return h;
}

DenseMatrix Mlp::forward(const ParamStore& store, const DenseMatrix& x) const {
  if (x.cols() != input_size())
    throw ValidationError("Mlp: input has " + std::to_string(x.cols()) + " columns, expected " +
                          std::to_string(input_size()));
  DenseMatrix h = x;
  for (const Layer& layer : layers_) {
    h = matmul(h, store[layer.weight_slot].value);
    const double* b = store[layer.bias_slot].value.data();
    for (std::size_t i = 0; i < h.rows(); ++i) {
      double* row = h.row(i).data();
      for (std::size_t j = 0; j < h.cols(); ++j) {
        const double v = row[j] + b[j];
        switch (layer.activation) {
          case Activation::Tanh: row[j] = std::tanh(v); break;
          case Activation::Silu: row[j] = silu(v); break;
          case Activation::Linear: row[j] = v; break;
        }
      }
    }
  }
  return h;
}

void Mlp::kaiming_init(ParamStore& store, RandomStream& stream) const {
  for (const Layer& layer : layers_) {
    const double sd = std::sqrt(2.0 / static_cast<double>(layer.fan_in));
    for (double& w : store[layer.weight_slot].value.flat()) w = stream.normal(0.0, sd);
    store[layer.bias_slot].value.fill(0.0);
  }
}

std::size_t Mlp::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const Layer& layer : layers_) n += layer.fan_in * layer.fan_out + layer.fan_out;
  return n;
}

}  // namespace hrom
