#include "hrom/numerics/dense_matrix.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "hrom/errors.hpp"

namespace hrom {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using Map = Eigen::Map<RowMajor>;

ConstMap view(const DenseMatrix& m) { return ConstMap(m.data(), m.rows(), m.cols()); }
Map view(DenseMatrix& m) { return Map(m.data(), m.rows(), m.cols()); }

std::string shape(const DenseMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw ValidationError("DenseMatrix: " + std::to_string(values_.size()) +
                          " values do not fill a " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " matrix");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::row_vector(std::span<const double> values) {
  return DenseMatrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

DenseMatrix DenseMatrix::column_vector(std::span<const double> values) {
  return DenseMatrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

std::vector<double> DenseMatrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::gather_rows(std::span<const std::size_t> indices) const {
  DenseMatrix out(indices.size(), cols_);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= rows_) throw ValidationError("gather_rows: row index out of range");
    std::copy_n(values_.data() + indices[k] * cols_, cols_, out.values_.data() + k * cols_);
  }
  return out;
}

DenseMatrix DenseMatrix::block_cols(std::size_t begin, std::size_t count) const {
  if (begin + count > cols_) throw ValidationError("block_cols: column range out of bounds");
  DenseMatrix out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    std::copy_n(values_.data() + i * cols_ + begin, count, out.values_.data() + i * count);
  return out;
}

void DenseMatrix::fill(double value) noexcept { std::fill(values_.begin(), values_.end(), value); }

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double scale) noexcept {
  for (double& v : values_) v *= scale;
  return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw ValidationError("matmul: " + shape(a) + " * " + shape(b));
  DenseMatrix c(a.rows(), b.cols());
  if (a.cols() == 0) return c;
  view(c).noalias() = view(a) * view(b);
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows())
    throw ValidationError("matmul_tn: " + shape(a) + "^T * " + shape(b));
  DenseMatrix c(a.cols(), b.cols());
  if (a.rows() == 0) return c;
  view(c).noalias() = view(a).transpose() * view(b);
  return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols())
    throw ValidationError("matmul_nt: " + shape(a) + " * " + shape(b) + "^T");
  DenseMatrix c(a.rows(), b.rows());
  if (a.cols() == 0) return c;
  view(c).noalias() = view(a) * view(b).transpose();
  return c;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "hadamard");
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] * b.data()[i];
  return c;
}

double squared_norm(const DenseMatrix& a) {
  double sum = 0.0;
  for (double v : a.values()) sum += v * v;
  return sum;
}

double frobenius_norm(const DenseMatrix& a) {
  require_finite(a, "frobenius_norm");
  // Scaled accumulation avoids overflow for entries near the double range.
  double scale = max_abs(a);
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : a.values()) {
    const double r = v / scale;
    sum += r * r;
  }
  return scale * std::sqrt(sum);
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

void require_finite(const DenseMatrix& a, std::string_view what) {
  if (!a.all_finite())
    throw ValidationError(std::string(what) + ": matrix contains non-finite entries");
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, std::string_view what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError(std::string(what) + ": shape mismatch " + shape(a) + " vs " + shape(b));
}

}  // namespace hrom
