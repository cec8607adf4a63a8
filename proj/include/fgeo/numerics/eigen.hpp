#pragma once

#include <cstddef>
#include <vector>

namespace fgeo::num {

// Dense symmetric eigensolver: Householder tridiagonalization + implicit-shift
// QL, no external linear algebra. Matrices are row-major n x n.

struct EigenResult {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // vectors[j] pairs with values[j]
};

// Full decomposition. Input must be symmetric within 1e-12 relative asymmetry.
EigenResult symmetric_eigen(const std::vector<double>& a, std::size_t n,
                            bool with_vectors = true);

// All eigenvalues (ascending) plus eigenvectors only for eigenvalues inside
// [lo, hi], computed by inverse iteration on the tridiagonal form and
// back-transformed. Intended for large n where only a spectral window matters.
struct WindowedEigenResult {
  std::vector<double> all_values;            // ascending, size n
  std::vector<std::size_t> selected;         // indices into all_values
  std::vector<std::vector<double>> vectors;  // aligned with selected
};
WindowedEigenResult symmetric_eigen_window(const std::vector<double>& a,
                                           std::size_t n, double lo, double hi);

// Tridiagonal core, exposed for reuse/testing.
struct Tridiag {
  std::size_t n = 0;
  std::vector<double> d;  // diagonal, size n
  std::vector<double> e;  // couplings (i, i+1), size n-1
  // Householder unit vectors per elimination step (may be empty when skipped).
  std::vector<std::vector<double>> reflectors;
};

Tridiag householder_tridiagonalize(std::vector<double> a, std::size_t n);
// x (length n, tridiagonal basis) -> Q x (original basis), in place.
void apply_q(const Tridiag& t, std::vector<double>& x);
// Implicit-shift QL. If z != nullptr it must hold n*n row-major storage whose
// columns get rotated along (pass identity to accumulate eigenvectors).
void tql(std::vector<double>& d, std::vector<double>& e, double* z,
         std::size_t n);

}  // namespace fgeo::num
