#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hrom {

/// Row-major dense matrix of doubles.
///
/// Row vectors (1 x n) double as the library's vector type wherever a
/// quantity broadcasts over a batch.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix row_vector(std::span<const double> values);
  static DenseMatrix column_vector(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::span<double> flat() noexcept { return values_; }
  std::span<const double> flat() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * cols_, cols_};
  }
  std::vector<double> column(std::size_t j) const;

  DenseMatrix transpose() const;
  /// Rows listed in `indices`, in that order.
  DenseMatrix gather_rows(std::span<const std::size_t> indices) const;
  DenseMatrix block_cols(std::size_t begin, std::size_t count) const;

  void fill(double value) noexcept;
  bool all_finite() const noexcept;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double scale) noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);

/// A * B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// A^T * B
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
/// A * B^T
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);

double frobenius_norm(const DenseMatrix& a);
double squared_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);

/// Throws ValidationError naming `what` when any entry is NaN or infinite.
void require_finite(const DenseMatrix& a, std::string_view what);
void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, std::string_view what);

}  // namespace hrom
