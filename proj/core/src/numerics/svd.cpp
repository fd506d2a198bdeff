#include "hrom/numerics/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hrom/errors.hpp"

namespace hrom {

namespace {

struct Reflector {
  double tau = 0.0;
  double beta = 0.0;
};

// Householder vector for x (in place): on return x[0] = 1, x[1..] = v tail and
// (I - tau v v^T) x_original = beta e_1.
Reflector make_reflector(double* x, std::size_t len, std::size_t stride) {
  Reflector r;
  const double alpha = x[0];
  double sigma = 0.0;
  for (std::size_t i = 1; i < len; ++i) sigma += x[i * stride] * x[i * stride];
  if (sigma == 0.0) {
    r.beta = alpha;
    x[0] = 1.0;
    return r;
  }
  const double norm = std::sqrt(alpha * alpha + sigma);
  r.beta = alpha <= 0.0 ? norm : -norm;
  r.tau = (r.beta - alpha) / r.beta;
  const double scale = 1.0 / (alpha - r.beta);
  for (std::size_t i = 1; i < len; ++i) x[i * stride] *= scale;
  x[0] = 1.0;
  return r;
}

struct Bidiagonal {
  DenseMatrix u;  // m x n
  DenseMatrix v;  // n x n
  std::vector<double> diag;
  std::vector<double> super;  // super[i] = B(i-1, i); super[0] = 0
};

// A = U B V^T for m >= n.
Bidiagonal bidiagonalize(DenseMatrix w) {
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  std::vector<double> left_tau(n, 0.0), right_tau(n, 0.0);
  Bidiagonal out;
  out.diag.assign(n, 0.0);
  out.super.assign(n, 0.0);
  std::vector<double> work(n);
  std::vector<double> column(m);

  for (std::size_t k = 0; k < n; ++k) {
    // Left reflector on column k, rows k..m-1 (gathered into a contiguous buffer).
    const std::size_t len = m - k;
    for (std::size_t i = 0; i < len; ++i) column[i] = w(k + i, k);
    const Reflector left = make_reflector(column.data(), len, 1);
    left_tau[k] = left.tau;
    out.diag[k] = left.beta;
    for (std::size_t i = 0; i < len; ++i) w(k + i, k) = column[i];
    if (left.tau != 0.0 && k + 1 < n) {
      const std::size_t width = n - k - 1;
      std::fill_n(work.begin(), width, 0.0);
      for (std::size_t i = 0; i < len; ++i) {
        const double vi = column[i];
        const double* row = &w(k + i, k + 1);
        for (std::size_t j = 0; j < width; ++j) work[j] += vi * row[j];
      }
      for (std::size_t i = 0; i < len; ++i) {
        const double f = left.tau * column[i];
        double* row = &w(k + i, k + 1);
        for (std::size_t j = 0; j < width; ++j) row[j] -= f * work[j];
      }
    }

    if (k + 2 < n) {
      // Right reflector on row k, columns k+1..n-1.
      double* x = &w(k, k + 1);
      const std::size_t rlen = n - k - 1;
      const Reflector right = make_reflector(x, rlen, 1);
      right_tau[k] = right.tau;
      out.super[k + 1] = right.beta;
      if (right.tau != 0.0) {
        for (std::size_t i = k + 1; i < m; ++i) {
          double* row = &w(i, k + 1);
          double dot = 0.0;
          for (std::size_t j = 0; j < rlen; ++j) dot += row[j] * x[j];
          const double f = right.tau * dot;
          for (std::size_t j = 0; j < rlen; ++j) row[j] -= f * x[j];
        }
      }
    } else if (k + 1 < n) {
      out.super[k + 1] = w(k, k + 1);
    }
  }

  // U = H_0 H_1 ... H_{n-1} [I; 0], accumulated backwards.
  out.u = DenseMatrix(m, n);
  for (std::size_t i = 0; i < n; ++i) out.u(i, i) = 1.0;
  for (std::size_t kk = n; kk-- > 0;) {
    const double tau = left_tau[kk];
    if (tau == 0.0) continue;
    const std::size_t len = m - kk;
    const std::size_t width = n - kk;
    std::fill_n(work.begin(), width, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      const double vi = i == 0 ? 1.0 : w(kk + i, kk);
      const double* row = &out.u(kk + i, kk);
      for (std::size_t j = 0; j < width; ++j) work[j] += vi * row[j];
    }
    for (std::size_t i = 0; i < len; ++i) {
      const double f = tau * (i == 0 ? 1.0 : w(kk + i, kk));
      double* row = &out.u(kk + i, kk);
      for (std::size_t j = 0; j < width; ++j) row[j] -= f * work[j];
    }
  }

  // V = G_0 G_1 ... G_{n-3}; G_k acts on indices k+1..n-1.
  out.v = DenseMatrix::identity(n);
  for (std::size_t kk = n >= 2 ? n - 2 : 0; kk-- > 0;) {
    const double tau = right_tau[kk];
    if (tau == 0.0) continue;
    const std::size_t off = kk + 1;
    const std::size_t len = n - off;
    std::fill_n(work.begin(), len, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      const double ui = i == 0 ? 1.0 : w(kk, off + i);
      const double* row = &out.v(off + i, off);
      for (std::size_t j = 0; j < len; ++j) work[j] += ui * row[j];
    }
    for (std::size_t i = 0; i < len; ++i) {
      const double f = tau * (i == 0 ? 1.0 : w(kk, off + i));
      double* row = &out.v(off + i, off);
      for (std::size_t j = 0; j < len; ++j) row[j] -= f * work[j];
    }
  }
  return out;
}

void rotate_columns(DenseMatrix& m, std::size_t a, std::size_t b, double c, double s) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double y = m(r, a);
    const double z = m(r, b);
    m(r, a) = y * c + z * s;
    m(r, b) = z * c - y * s;
  }
}

// Smallest singular value of [[f, g], [0, h]].
double smallest_singular_2x2(double f, double g, double h) {
  const double fa = std::abs(f), ga = std::abs(g), ha = std::abs(h);
  const double big = 0.5 * (std::hypot(fa + ha, ga) + std::hypot(fa - ha, ga));
  return big == 0.0 ? 0.0 : fa * ha / big;
}

void plane_rotation(double f, double g, double& c, double& s, double& r) {
  if (g == 0.0) {
    c = 1.0;
    s = 0.0;
    r = f;
  } else if (f == 0.0) {
    c = 0.0;
    s = 1.0;
    r = g;
  } else {
    r = std::hypot(f, g);
    c = f / r;
    s = g / r;
  }
}

// One implicit zero-shift QR sweep over the block l..k, top to bottom.
void zero_shift_sweep(std::vector<double>& w, std::vector<double>& rv1, std::size_t l, std::size_t k,
                      DenseMatrix& left, DenseMatrix& right) {
  double cs = 1.0, sn = 0.0, oldcs = 1.0, oldsn = 0.0, r = 0.0;
  for (std::size_t i = l; i < k; ++i) {
    plane_rotation(w[i] * cs, rv1[i + 1], cs, sn, r);
    if (i > l) rv1[i] = oldsn * r;
    plane_rotation(oldcs * r, w[i + 1] * sn, oldcs, oldsn, w[i]);
    rotate_columns(right, i, i + 1, cs, sn);
    rotate_columns(left, i, i + 1, oldcs, oldsn);
  }
  const double h = w[k] * cs;
  w[k] = h * oldcs;
  rv1[k] = h * oldsn;
}

// Diagonalizes the bidiagonal (w, rv1) with implicit Wilkinson-shifted QR.
// Rotations are accumulated into the n x n matrices left and right.
void diagonalize(std::vector<double>& w, std::vector<double>& rv1, DenseMatrix& left,
                 DenseMatrix& right) {
  const std::size_t n = w.size();
  // Absolute deflation threshold as in LAPACK's bdsqr: with eps * ||B|| the
  // chase leaves roundoff of that size in the trailing entries of graded
  // matrices and the iteration stalls.
  const double eps = std::numeric_limits<double>::epsilon();
  const double tol = std::clamp(std::pow(eps, -0.125), 10.0, 100.0) * eps;
  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) anorm = std::max(anorm, std::abs(w[i]) + std::abs(rv1[i]));
  const double thresh = tol * anorm;
  constexpr int kMaxIterations = 75;

  for (std::size_t kk = n; kk-- > 0;) {
    const std::size_t k = kk;
    for (int its = 0;; ++its) {
      bool cancel = true;
      std::size_t l = k;
      for (;; --l) {
        if (l == 0 || std::abs(rv1[l]) <= thresh) {
          cancel = false;
          break;
        }
        if (std::abs(w[l - 1]) <= thresh) break;
      }
      if (cancel) {
        const std::size_t nm = l - 1;
        double c = 0.0;
        double s = 1.0;
        for (std::size_t i = l; i <= k; ++i) {
          const double f = s * rv1[i];
          rv1[i] = c * rv1[i];
          if (std::abs(f) <= thresh) break;
          const double g = w[i];
          const double h = std::hypot(f, g);
          w[i] = h;
          c = g / h;
          s = -f / h;
          rotate_columns(left, nm, i, c, s);
        }
      }
      double z = w[k];
      if (l == k) {
        if (z < 0.0) {
          w[k] = -z;
          for (std::size_t r = 0; r < n; ++r) right(r, k) = -right(r, k);
        }
        break;
      }
      if (its >= kMaxIterations) throw DomainError("thin_svd: QR iteration did not converge");

      // Graded blocks: a shift far below the block norm makes the shifted
      // chase lose its bulge to underflow before reaching the bottom, so use
      // the zero-shift sweep of Demmel and Kahan there.
      double smax = 0.0;
      for (std::size_t i = l; i <= k; ++i) smax = std::max({smax, std::abs(w[i]), std::abs(rv1[i])});
      const double shift = smallest_singular_2x2(w[k - 1], rv1[k], w[k]);
      if (smax > 0.0 && (shift / smax) * (shift / smax) < eps) {
        zero_shift_sweep(w, rv1, l, k, left, right);
        continue;
      }

      double x = w[l];
      const std::size_t nm = k - 1;
      double y = w[nm];
      double g = rv1[nm];
      double h = rv1[k];
      double f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
      g = std::hypot(f, 1.0);
      f = ((x - z) * (x + z) + h * ((y / (f + std::copysign(g, f))) - h)) / x;
      double c = 1.0;
      double s = 1.0;
      for (std::size_t j = l; j <= nm; ++j) {
        const std::size_t i = j + 1;
        g = rv1[i];
        y = w[i];
        h = s * g;
        g = c * g;
        z = std::hypot(f, h);
        rv1[j] = z;
        c = f / z;
        s = h / z;
        f = x * c + g * s;
        g = g * c - x * s;
        h = y * s;
        y *= c;
        rotate_columns(right, j, i, c, s);
        z = std::hypot(f, h);
        w[j] = z;
        if (z != 0.0) {
          c = f / z;
          s = h / z;
        }
        f = c * g + s * y;
        x = c * y - s * g;
        rotate_columns(left, j, i, c, s);
      }
      rv1[l] = 0.0;
      rv1[k] = f;
      w[k] = x;
    }
  }
}

// Full thin SVD for m >= n: A = U diag(S) V^T with U m x n, V n x n (unsorted).
void svd_tall(const DenseMatrix& a, DenseMatrix& u, std::vector<double>& s, DenseMatrix& v) {
  Bidiagonal bd = bidiagonalize(a);
  const std::size_t n = a.cols();
  DenseMatrix left = DenseMatrix::identity(n);
  DenseMatrix right = DenseMatrix::identity(n);
  diagonalize(bd.diag, bd.super, left, right);
  u = matmul(bd.u, left);
  v = matmul(bd.v, right);
  s = std::move(bd.diag);
}

}  // namespace

SVDResult thin_svd(const DenseMatrix& a, std::size_t k) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (k < 1 || k > std::min(m, n)) {
    throw DomainError("thin_svd: k = " + std::to_string(k) + " outside [1, " +
                      std::to_string(std::min(m, n)) + "]");
  }
  require_finite(a, "thin_svd");

  DenseMatrix u, v;
  std::vector<double> s;
  if (m >= n) {
    svd_tall(a, u, s, v);
  } else {
    svd_tall(a.transpose(), v, s, u);
  }

  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return s[i] > s[j]; });

  SVDResult out;
  out.U = DenseMatrix(m, k);
  out.Vt = DenseMatrix(k, n);
  out.S.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t src = order[c];
    out.S[c] = s[src];
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (std::abs(u(r, src)) > best) {
        best = std::abs(u(r, src));
        arg = r;
      }
    }
    const double sign = u(arg, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < m; ++r) out.U(r, c) = sign * u(r, src);
    for (std::size_t r = 0; r < n; ++r) out.Vt(c, r) = sign * v(r, src);
  }
  return out;
}

}  // namespace hrom
