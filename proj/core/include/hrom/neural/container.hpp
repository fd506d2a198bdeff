#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hrom/numerics/dense_matrix.hpp"

namespace hrom {

/// Versioned binary container shared by checkpoints and datasets.
///
/// Layout: a text header
///
///     HROMCONTAINER
///     format_version 1
///     kind <kind>
///     meta <key> <value>        (zero or more)
///     tensor <name> <rows> <cols> <group>   (zero or more)
///     end
///
/// followed by the tensors' values as little-endian 64-bit floats, row-major,
/// in manifest order.
struct ContainerTensor {
  std::string name;
  std::string group;
  std::size_t rows = 0;
  std::size_t cols = 0;
  DenseMatrix value;  ///< empty when read with payload = false
};

class Container {
 public:
  static constexpr int kFormatVersion = 1;

  Container() = default;
  explicit Container(std::string kind) : kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }
  int format_version() const noexcept { return version_; }

  void set_meta(const std::string& key, const std::string& value);
  std::optional<std::string> find_meta(std::string_view key) const;
  /// Throws IoError when the key is missing.
  const std::string& meta(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& meta_entries() const noexcept { return meta_; }

  void add_tensor(const std::string& name, DenseMatrix value, const std::string& group);
  const ContainerTensor* find_tensor(std::string_view name) const;
  /// Throws IoError when the tensor is missing.
  const DenseMatrix& tensor(std::string_view name) const;
  const std::vector<ContainerTensor>& tensors() const noexcept { return tensors_; }

  void write(std::ostream& out) const;
  std::string to_bytes() const;
  void save(const std::filesystem::path& path) const;

  /// With payload = false only the header is parsed (used by `inspect`).
  static Container read(std::istream& in, bool payload = true);
  static Container from_bytes(const std::string& bytes);
  static Container load(const std::filesystem::path& path, bool payload = true);

 private:
  std::string kind_;
  int version_ = kFormatVersion;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<ContainerTensor> tensors_;
};

}  // namespace hrom
