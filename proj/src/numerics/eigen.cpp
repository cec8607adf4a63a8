#include "fgeo/numerics/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fgeo/common.hpp"

namespace fgeo::num {
namespace {

void check_symmetric(const std::vector<double>& a, std::size_t n) {
  double scale = 0, asym = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      scale = std::max(scale, std::abs(a[i * n + j]));
      asym = std::max(asym, std::abs(a[i * n + j] - a[j * n + i]));
    }
  require(asym <= 1e-12 * std::max(scale, 1e-300) || asym == 0.0,
          "symmetric_eigen: input is not symmetric");
}

// Tridiagonal LU solve with partial pivoting, factored on the fly.
// Solves (T - sigma I) x = b for the inverse-iteration kernel.
void shifted_tridiag_solve(const std::vector<double>& d,
                           const std::vector<double>& e, double sigma,
                           std::vector<double>& x) {
  const std::size_t n = d.size();
  std::vector<double> dl(n, 0), du(n, 0), du2(n, 0), diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = d[i] - sigma;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    dl[i] = e[i];
    du[i] = e[i];
  }
  // forward elimination with row pivoting
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(diag[i]) >= std::abs(dl[i])) {
      double piv = diag[i];
      if (piv == 0.0) piv = 1e-300;
      double m = dl[i] / piv;
      diag[i + 1] -= m * du[i];
      x[i + 1] -= m * x[i];
      dl[i] = 0;
      du2[i] = 0;
    } else {
      // swap rows i, i+1
      double m = diag[i] / dl[i];
      diag[i] = dl[i];
      double tmp = diag[i + 1];
      diag[i + 1] = du[i] - m * tmp;
      du2[i] = (i + 2 < n) ? du[i + 1] : 0.0;
      du[i] = tmp;
      if (i + 2 < n) du[i + 1] = -m * du2[i];
      std::swap(x[i], x[i + 1]);
      x[i + 1] -= m * x[i];
      dl[i] = 0;
    }
  }
  // back substitution
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    if (ii + 1 < n) s -= du[ii] * x[ii + 1];
    if (ii + 2 < n) s -= du2[ii] * x[ii + 2];
    double piv = diag[ii];
    if (piv == 0.0) piv = 1e-300;
    x[ii] = s / piv;
  }
}

double vec_norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

Tridiag householder_tridiagonalize(std::vector<double> a, std::size_t n) {
  Tridiag t;
  t.n = n;
  t.d.assign(n, 0);
  t.e.assign(n > 0 ? n - 1 : 0, 0);
  if (n == 0) return t;
  if (n >= 3) t.reflectors.resize(n - 2);

  std::vector<double> v, p, w;
  for (std::size_t i = 0; i + 2 < n; ++i) {
    const std::size_t m = n - 1 - i;  // trailing block size
    v.assign(m, 0);
    double colnorm = 0;
    for (std::size_t k = 0; k < m; ++k) {
      v[k] = a[(i + 1 + k) * n + i];
      colnorm += v[k] * v[k];
    }
    colnorm = std::sqrt(colnorm);
    if (colnorm == 0.0) {
      t.e[i] = 0;
      continue;
    }
    double alpha = (v[0] >= 0) ? -colnorm : colnorm;
    v[0] -= alpha;
    double vn = vec_norm(v);
    t.e[i] = alpha;
    if (vn == 0.0) continue;
    for (auto& x : v) x /= vn;

    // B <- (I-2vv^T) B (I-2vv^T) on the trailing block, via rank-2 update
    p.assign(m, 0);
    for (std::size_t r = 0; r < m; ++r) {
      double s = 0;
      const double* row = &a[(i + 1 + r) * n + i + 1];
      for (std::size_t c = 0; c < m; ++c) s += row[c] * v[c];
      p[r] = s;
    }
    double vp = 0;
    for (std::size_t k = 0; k < m; ++k) vp += v[k] * p[k];
    w.assign(m, 0);
    for (std::size_t k = 0; k < m; ++k) w[k] = 2.0 * (p[k] - vp * v[k]);
    for (std::size_t r = 0; r < m; ++r) {
      double* row = &a[(i + 1 + r) * n + i + 1];
      for (std::size_t c = 0; c < m; ++c)
        row[c] -= v[r] * w[c] + w[r] * v[c];
    }
    // zero out the eliminated column (bookkeeping only)
    a[(i + 1) * n + i] = alpha;
    for (std::size_t k = 1; k < m; ++k) a[(i + 1 + k) * n + i] = 0;
    t.reflectors[i] = v;
  }
  for (std::size_t i = 0; i < n; ++i) t.d[i] = a[i * n + i];
  if (n >= 2) t.e[n - 2] = a[(n - 1) * n + (n - 2)];
  return t;
}

void apply_q(const Tridiag& t, std::vector<double>& x) {
  require(x.size() == t.n, "apply_q: dimension mismatch");
  if (t.n < 3) return;
  for (std::size_t step = t.n - 2; step-- > 0;) {
    const auto& v = t.reflectors[step];
    if (v.empty()) continue;
    const std::size_t off = step + 1;
    double s = 0;
    for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * x[off + k];
    s *= 2.0;
    for (std::size_t k = 0; k < v.size(); ++k) x[off + k] -= s * v[k];
  }
}

void tql(std::vector<double>& d, std::vector<double>& e, double* z,
         std::size_t n) {
  if (n == 0) return;
  require(d.size() == n && e.size() == n - 1, "tql: bad tridiagonal sizes");
  const double eps = 2.22e-16;
  std::vector<double> ee(e.begin(), e.end());
  ee.push_back(0.0);
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(ee[m]) <= eps * dd) break;
      }
      if (m != l) {
        require(iter++ < 64, "tql: failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * ee[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + ee[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t ii = m; ii-- > l;) {
          double f = s * ee[ii];
          double b = c * ee[ii];
          r = std::hypot(f, g);
          ee[ii + 1] = r;
          if (r == 0.0) {
            d[ii + 1] -= p;
            ee[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[ii + 1] - p;
          r = (d[ii] - g) * s + 2.0 * c * b;
          p = s * r;
          d[ii + 1] = g + p;
          g = c * r - b;
          if (z) {
            for (std::size_t k = 0; k < n; ++k) {
              f = z[k * n + ii + 1];
              z[k * n + ii + 1] = s * z[k * n + ii] + c * f;
              z[k * n + ii] = c * z[k * n + ii] - s * f;
            }
          }
        }
        if (underflow) continue;
        d[l] -= p;
        ee[l] = g;
        ee[m] = 0.0;
      }
    } while (m != l);
  }
}

EigenResult symmetric_eigen(const std::vector<double>& a, std::size_t n,
                            bool with_vectors) {
  require(a.size() == n * n, "symmetric_eigen: bad storage size");
  require(n >= 1, "symmetric_eigen: empty matrix");
  check_symmetric(a, n);

  Tridiag t = householder_tridiagonalize(a, n);
  EigenResult res;
  std::vector<double> d = t.d, e = t.e;
  if (!with_vectors) {
    tql(d, e, nullptr, n);
    std::sort(d.begin(), d.end());
    res.values = std::move(d);
    return res;
  }
  std::vector<double> z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  tql(d, e, z.data(), n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
  res.values.resize(n);
  res.vectors.resize(n);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    res.values[j] = d[order[j]];
    for (std::size_t k = 0; k < n; ++k) col[k] = z[k * n + order[j]];
    apply_q(t, col);
    res.vectors[j] = col;
  }
  return res;
}

WindowedEigenResult symmetric_eigen_window(const std::vector<double>& a,
                                           std::size_t n, double lo,
                                           double hi) {
  require(a.size() == n * n, "symmetric_eigen_window: bad storage size");
  require(lo <= hi, "symmetric_eigen_window: empty window");
  check_symmetric(a, n);

  Tridiag t = householder_tridiagonalize(a, n);
  std::vector<double> d = t.d, e = t.e;
  tql(d, e, nullptr, n);
  std::sort(d.begin(), d.end());

  WindowedEigenResult res;
  res.all_values = d;

  double tscale = 0;
  for (double x : t.d) tscale = std::max(tscale, std::abs(x));
  for (double x : t.e) tscale = std::max(tscale, std::abs(x));
  tscale = std::max(tscale, 1e-30);

  // Inverse iteration per selected eigenvalue, with slightly separated shifts
  // inside near-degenerate groups and in-group reorthogonalization.
  const double group_tol = 1e-7 * tscale;
  Rng rng(0x5eed5eedULL);
  std::vector<std::vector<double>> group_tri_vectors;
  for (std::size_t j = 0; j < n; ++j) {
    if (d[j] < lo || d[j] > hi) continue;
    if (!res.selected.empty() &&
        std::abs(d[j] - d[res.selected.back()]) > group_tol) {
      group_tri_vectors.clear();
    }
    double sigma = d[j] + 1e-11 * tscale * static_cast<double>(group_tri_vectors.size());

    std::vector<double> x(n);
    bool ok = false;
    for (int attempt = 0; attempt < 5 && !ok; ++attempt) {
      for (auto& xi : x) xi = rng.normal();
      for (int it = 0; it < 6; ++it) {
        shifted_tridiag_solve(t.d, t.e, sigma, x);
        // Gram-Schmidt against the group's previous vectors
        for (const auto& u : group_tri_vectors) {
          double s = 0;
          for (std::size_t k = 0; k < n; ++k) s += u[k] * x[k];
          for (std::size_t k = 0; k < n; ++k) x[k] -= s * u[k];
        }
        double nx = vec_norm(x);
        if (nx < 1e-280) break;
        for (auto& xi : x) xi /= nx;
        // residual ||(T - d_j) x||
        double rmax = 0;
        for (std::size_t k = 0; k < n; ++k) {
          double r = (t.d[k] - d[j]) * x[k];
          if (k > 0) r += t.e[k - 1] * x[k - 1];
          if (k + 1 < n) r += t.e[k] * x[k + 1];
          rmax = std::max(rmax, std::abs(r));
        }
        if (rmax <= 1e-11 * tscale) {
          ok = true;
          break;
        }
      }
    }
    require(ok, "symmetric_eigen_window: inverse iteration failed to converge");
    group_tri_vectors.push_back(x);
    apply_q(t, x);
    res.selected.push_back(j);
    res.vectors.push_back(std::move(x));
  }
  return res;
}

}  // namespace fgeo::num
