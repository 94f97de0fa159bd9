#include "hops/eigen_sym.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hops/error.hpp"
#include "hops/kernels.hpp"

namespace hops {
namespace {

// Householder reduction to tridiagonal form, accumulating the transform.
// Classic tred2 restructured so every inner loop runs over contiguous rows.
// On return z holds Q (eigenvector candidates as columns), d the diagonal and
// e the subdiagonal (e[0] = 0) of T = Q^T A Q.
void tridiagonalize(Matrix& z, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = z.rows();
  const auto& k = kern::ops();
  std::vector<double> p(n, 0.0);

  for (std::size_t i = n - 1; i >= 2; --i) {
    const std::size_t l = i - 1;
    double* u = z.data() + i * n;  // row i, entries 0..l hold the working vector
    double h = 0.0;
    double scale = 0.0;
    for (std::size_t q = 0; q <= l; ++q) scale += std::abs(u[q]);
    if (scale == 0.0) {
      e[i] = u[l];
      d[i] = 0.0;
      continue;
    }
    k.scal(1.0 / scale, u, l + 1);
    h = k.sum_sq(u, l + 1);
    double f = u[l];
    double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
    e[i] = scale * g;
    h -= f * g;
    u[l] = f - g;
    // column i keeps u/h for the accumulation pass
    for (std::size_t q = 0; q <= l; ++q) z(q, i) = u[q] / h;

    // p = A_sub u / h using the lower triangle of the leading (l+1) block
    std::fill(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(l + 1), 0.0);
    for (std::size_t j = 0; j <= l; ++j) {
      const double* arow = z.data() + j * n;
      p[j] += k.dot(arow, u, j + 1);
      if (j > 0 && u[j] != 0.0) k.axpy(u[j], arow, p.data(), j);
    }
    k.scal(1.0 / h, p.data(), l + 1);

    f = k.dot(p.data(), u, l + 1);
    const double hh = f / (h + h);
    // q = p - hh u, stored back into p
    k.axpy(-hh, u, p.data(), l + 1);
    // A_sub -= u q^T + q u^T (lower triangle)
    for (std::size_t j = 0; j <= l; ++j) {
      double* arow = z.data() + j * n;
      if (u[j] != 0.0) k.axpy(-u[j], p.data(), arow, j + 1);
      if (p[j] != 0.0) k.axpy(-p[j], u, arow, j + 1);
    }
    d[i] = h;
  }
  if (n >= 2) e[1] = z(1, 0);
  d[0] = 0.0;
  if (n >= 2) d[1] = 0.0;
  e[0] = 0.0;

  // Accumulate the Householder transforms into Q.
  std::vector<double> gvec(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = i;  // transform i touches indices < i
    if (d[i] != 0.0) {
      const double* u = z.data() + i * n;
      std::fill(gvec.begin(), gvec.begin() + static_cast<std::ptrdiff_t>(l), 0.0);
      for (std::size_t r = 0; r < l; ++r) {
        if (u[r] != 0.0) k.axpy(u[r], z.data() + r * n, gvec.data(), l);
      }
      for (std::size_t r = 0; r < l; ++r) {
        double w = z(r, i);
        if (w != 0.0) k.axpy(-w, gvec.data(), z.data() + r * n, l);
      }
    }
    d[i] = z(i, i);
    z(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      z(i, j) = 0.0;
      z(j, i) = 0.0;
    }
  }
}

// Implicit-shift QL on the tridiagonal (d, e), rotations applied to the rows
// of z (rows of Q^T, so each finished row is an eigenvector).
void ql_implicit(std::vector<double>& d, std::vector<double>& e, Matrix& z) {
  const std::size_t n = d.size();
  if (n <= 1) return;
  const auto& k = kern::ops();
  const double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 50) {
          throw NumericalError("eigen.no_convergence",
                               "QL iteration failed to converge");
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        std::ptrdiff_t i;
        for (i = static_cast<std::ptrdiff_t>(m) - 1;
             i >= static_cast<std::ptrdiff_t>(l); --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {  // recover from underflow
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          k.rot(z.data() + static_cast<std::size_t>(i) * n,
                z.data() + (static_cast<std::size_t>(i) + 1) * n, n, c, s);
        }
        if (r == 0.0 && i >= static_cast<std::ptrdiff_t>(l)) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

SymmetricEigen eigen_sym(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("eigen.square", "eigen_sym expects a square matrix");
  }
  const std::size_t n = a.rows();
  SymmetricEigen out;
  if (n == 0) return out;

  Matrix z = a;
  std::vector<double> d(n, 0.0);
  std::vector<double> e(n, 0.0);
  if (n == 1) {
    d[0] = a(0, 0);
    z = Matrix::identity(1);
  } else {
    tridiagonalize(z, d, e);
    // QL rotates eigenvector candidates as contiguous rows, so hand it Q^T
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) std::swap(z(i, j), z(j, i));
    }
    ql_implicit(d, e, z);
  }

  // Sort descending (stable for repeated eigenvalues) and fix each vector's
  // sign so the entry of largest magnitude is positive.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });

  out.values.resize(n);
  Matrix rows(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = d[order[i]];
    auto src = z.row(order[i]);
    auto dst = rows.row(i);
    std::size_t arg = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (std::abs(src[j]) > std::abs(src[arg])) arg = j;
    }
    double flip = src[arg] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) dst[j] = flip * src[j];
  }
  out.vectors = rows.transposed();
  return out;
}

}  // namespace hops
