#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrom/numerics/dense_matrix.hpp"

namespace hrom {

/// Optimizer group a tensor belongs to; each group has its own learning rate.
enum class ParamGroup { Network, Blend, Frequency };

std::string_view to_string(ParamGroup group) noexcept;
ParamGroup parse_param_group(std::string_view name);

struct Tensor {
  std::string name;
  DenseMatrix value;
  DenseMatrix grad;  ///< same shape as value
  ParamGroup group = ParamGroup::Network;
};

/// Named trainable tensors with matching gradient buffers.
class ParamStore {
 public:
  /// Adds a tensor and returns its slot. Names must be unique.
  std::size_t add(std::string name, DenseMatrix value, ParamGroup group);

  std::size_t size() const noexcept { return tensors_.size(); }
  Tensor& operator[](std::size_t slot) { return tensors_.at(slot); }
  const Tensor& operator[](std::size_t slot) const { return tensors_.at(slot); }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Like find() but throws ValidationError when the name is unknown.
  std::size_t slot(std::string_view name) const;

  void zero_grads() noexcept;

  /// Number of scalar entries, optionally restricted to one group.
  std::size_t parameter_count() const noexcept;
  std::size_t parameter_count(ParamGroup group) const noexcept;

  /// Concatenated values (or gradients) in slot order.
  std::vector<double> flat_values() const;
  std::vector<double> flat_grads() const;
  void assign_flat_values(const std::vector<double>& flat);

  auto begin() noexcept { return tensors_.begin(); }
  auto end() noexcept { return tensors_.end(); }
  auto begin() const noexcept { return tensors_.begin(); }
  auto end() const noexcept { return tensors_.end(); }

 private:
  std::vector<Tensor> tensors_;
};

}  // namespace hrom
