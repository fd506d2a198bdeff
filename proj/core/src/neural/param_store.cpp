#include "hrom/neural/param_store.hpp"

#include <algorithm>

#include "hrom/errors.hpp"

namespace hrom {

std::string_view to_string(ParamGroup group) noexcept {
  switch (group) {
    case ParamGroup::Network: return "network";
    case ParamGroup::Blend: return "blend";
    case ParamGroup::Frequency: return "frequency";
  }
  return "network";
}

ParamGroup parse_param_group(std::string_view name) {
  if (name == "network") return ParamGroup::Network;
  if (name == "blend") return ParamGroup::Blend;
  if (name == "frequency") return ParamGroup::Frequency;
  throw ValidationError("unknown parameter group '" + std::string(name) + "'");
}

std::size_t ParamStore::add(std::string name, DenseMatrix value, ParamGroup group) {
  if (find(name)) throw ValidationError("ParamStore: duplicate tensor name '" + name + "'");
  Tensor t;
  t.grad = DenseMatrix(value.rows(), value.cols());
  t.value = std::move(value);
  t.name = std::move(name);
  t.group = group;
  tensors_.push_back(std::move(t));
  return tensors_.size() - 1;
}

std::optional<std::size_t> ParamStore::find(std::string_view name) const {
  for (std::size_t i = 0; i < tensors_.size(); ++i)
    if (tensors_[i].name == name) return i;
  return std::nullopt;
}

std::size_t ParamStore::slot(std::string_view name) const {
  if (auto s = find(name)) return *s;
  throw ValidationError("ParamStore: no tensor named '" + std::string(name) + "'");
}

void ParamStore::zero_grads() noexcept {
  for (auto& t : tensors_) t.grad.fill(0.0);
}

std::size_t ParamStore::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.value.size();
  return n;
}

std::size_t ParamStore::parameter_count(ParamGroup group) const noexcept {
  std::size_t n = 0;
  for (const auto& t : tensors_)
    if (t.group == group) n += t.value.size();
  return n;
}

std::vector<double> ParamStore::flat_values() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& t : tensors_) out.insert(out.end(), t.value.values().begin(), t.value.values().end());
  return out;
}

std::vector<double> ParamStore::flat_grads() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& t : tensors_) out.insert(out.end(), t.grad.values().begin(), t.grad.values().end());
  return out;
}

void ParamStore::assign_flat_values(const std::vector<double>& flat) {
  if (flat.size() != parameter_count()) throw ValidationError("assign_flat_values: size mismatch");
  std::size_t offset = 0;
  for (auto& t : tensors_) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), t.value.size(), t.value.data());
    offset += t.value.size();
  }
}

}  // namespace hrom
