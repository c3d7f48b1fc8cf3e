// Dense double-precision kernels for the tagger.
//
// Each kernel has an OpenMP variant and a serial reference. The parallel
// variants partition output elements across threads, so every element is
// still a sequential sum and results are bit-identical to the reference at
// any thread count.

#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace treeaug {

using Vector = std::vector<double>;

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * static_cast<size_t>(c)) {}

  double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  size_t size() const { return a.size(); }
};

// y = W x
void matvec(const Matrix& w, const Vector& x, Vector& y);
void matvec_serial(const Matrix& w, const Vector& x, Vector& y);

// y += W^T x
void matvec_transpose_add(const Matrix& w, const Vector& x, Vector& y);
void matvec_transpose_add_serial(const Matrix& w, const Vector& x, Vector& y);

// W += x y^T  (len(x) = rows, len(y) = cols); the gradient outer product.
void add_outer(Matrix& w, const Vector& x, const Vector& y);
void add_outer_serial(Matrix& w, const Vector& x, const Vector& y);

inline void add_scaled(Vector& y, const Vector& x, double s) {
  assert(y.size() == x.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

inline void add_inplace(Vector& y, const Vector& x) { add_scaled(y, x, 1.0); }

}  // namespace treeaug
