#include "treeaug/linalg.hpp"

namespace treeaug {

// Below this many multiply-adds the fork/join overhead dominates; toy models
// in the tests sit under it, training-size models sit well above.
static constexpr size_t kParallelCutoff = 16384;

void matvec_serial(const Matrix& w, const Vector& x, Vector& y) {
  assert(static_cast<size_t>(w.cols) == x.size());
  y.assign(static_cast<size_t>(w.rows), 0.0);
  for (int r = 0; r < w.rows; ++r) {
    const double* row = &w.a[static_cast<size_t>(r) * w.cols];
    double acc = 0.0;
    for (int c = 0; c < w.cols; ++c) acc += row[c] * x[static_cast<size_t>(c)];
    y[static_cast<size_t>(r)] = acc;
  }
}

void matvec(const Matrix& w, const Vector& x, Vector& y) {
  assert(static_cast<size_t>(w.cols) == x.size());
  y.assign(static_cast<size_t>(w.rows), 0.0);
#pragma omp parallel for schedule(static) if (w.size() > kParallelCutoff)
  for (int r = 0; r < w.rows; ++r) {
    const double* row = &w.a[static_cast<size_t>(r) * w.cols];
    double acc = 0.0;
    for (int c = 0; c < w.cols; ++c) acc += row[c] * x[static_cast<size_t>(c)];
    y[static_cast<size_t>(r)] = acc;
  }
}

void matvec_transpose_add_serial(const Matrix& w, const Vector& x, Vector& y) {
  assert(static_cast<size_t>(w.rows) == x.size());
  assert(static_cast<size_t>(w.cols) == y.size());
  for (int c = 0; c < w.cols; ++c) {
    double acc = 0.0;
    for (int r = 0; r < w.rows; ++r) acc += w.a[static_cast<size_t>(r) * w.cols + c] * x[static_cast<size_t>(r)];
    y[static_cast<size_t>(c)] += acc;
  }
}

void matvec_transpose_add(const Matrix& w, const Vector& x, Vector& y) {
  assert(static_cast<size_t>(w.rows) == x.size());
  assert(static_cast<size_t>(w.cols) == y.size());
#pragma omp parallel for schedule(static) if (w.size() > kParallelCutoff)
  for (int c = 0; c < w.cols; ++c) {
    double acc = 0.0;
    for (int r = 0; r < w.rows; ++r) acc += w.a[static_cast<size_t>(r) * w.cols + c] * x[static_cast<size_t>(r)];
    y[static_cast<size_t>(c)] += acc;
  }
}

void add_outer_serial(Matrix& w, const Vector& x, const Vector& y) {
  assert(static_cast<size_t>(w.rows) == x.size());
  assert(static_cast<size_t>(w.cols) == y.size());
  for (int r = 0; r < w.rows; ++r) {
    double* row = &w.a[static_cast<size_t>(r) * w.cols];
    const double xr = x[static_cast<size_t>(r)];
    for (int c = 0; c < w.cols; ++c) row[c] += xr * y[static_cast<size_t>(c)];
  }
}

void add_outer(Matrix& w, const Vector& x, const Vector& y) {
  assert(static_cast<size_t>(w.rows) == x.size());
  assert(static_cast<size_t>(w.cols) == y.size());
#pragma omp parallel for schedule(static) if (w.size() > kParallelCutoff)
  for (int r = 0; r < w.rows; ++r) {
    double* row = &w.a[static_cast<size_t>(r) * w.cols];
    const double xr = x[static_cast<size_t>(r)];
    for (int c = 0; c < w.cols; ++c) row[c] += xr * y[static_cast<size_t>(c)];
  }
}

}  // namespace treeaug
