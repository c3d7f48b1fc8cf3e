#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "treeaug/linalg.hpp"
#include "treeaug/lstm.hpp"
#include "treeaug/rng.hpp"

using namespace treeaug;

namespace {

Matrix random_matrix(int r, int c, RandomStream& g) {
  Matrix m(r, c);
  for (double& v : m.a) v = uniform_real(g, -1.0, 1.0);
  return m;
}

Vector random_vector(size_t n, RandomStream& g) {
  Vector v(n);
  for (double& x : v) x = uniform_real(g, -1.0, 1.0);
  return v;
}

// Plain-loop references, written independently of src/linalg.cpp. The
// accumulation order matches the kernels' contract (ascending index per
// output element), so comparisons can be exact.
Vector naive_matvec(const Matrix& w, const Vector& x) {
  Vector y(static_cast<size_t>(w.rows), 0.0);
  for (int i = 0; i < w.rows; ++i) {
    for (int j = 0; j < w.cols; ++j) y[static_cast<size_t>(i)] += w(i, j) * x[static_cast<size_t>(j)];
  }
  return y;
}

Vector naive_matvec_transpose(const Matrix& w, const Vector& x) {
  Vector y(static_cast<size_t>(w.cols), 0.0);
  for (int j = 0; j < w.cols; ++j) {
    for (int i = 0; i < w.rows; ++i) y[static_cast<size_t>(j)] += w(i, j) * x[static_cast<size_t>(i)];
  }
  return y;
}

double sigmoid_ref(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Independent scalar LSTM forward used as the oracle; same [i f g o] layout.
std::vector<Vector> reference_lstm(const LstmParams& p, const std::vector<Vector>& xs) {
  const int H = p.hidden();
  const int I = p.input();
  std::vector<Vector> hs;
  Vector h(static_cast<size_t>(H), 0.0), c(static_cast<size_t>(H), 0.0);
  for (const Vector& x : xs) {
    Vector h_new(static_cast<size_t>(H)), c_new(static_cast<size_t>(H));
    for (int j = 0; j < H; ++j) {
      double zi = p.b[static_cast<size_t>(j)];
      double zf = p.b[static_cast<size_t>(H + j)];
      double zg = p.b[static_cast<size_t>(2 * H + j)];
      double zo = p.b[static_cast<size_t>(3 * H + j)];
      for (int k = 0; k < I; ++k) {
        zi += p.wx(j, k) * x[static_cast<size_t>(k)];
        zf += p.wx(H + j, k) * x[static_cast<size_t>(k)];
        zg += p.wx(2 * H + j, k) * x[static_cast<size_t>(k)];
        zo += p.wx(3 * H + j, k) * x[static_cast<size_t>(k)];
      }
      for (int k = 0; k < H; ++k) {
        zi += p.wh(j, k) * h[static_cast<size_t>(k)];
        zf += p.wh(H + j, k) * h[static_cast<size_t>(k)];
        zg += p.wh(2 * H + j, k) * h[static_cast<size_t>(k)];
        zo += p.wh(3 * H + j, k) * h[static_cast<size_t>(k)];
      }
      c_new[static_cast<size_t>(j)] =
          sigmoid_ref(zf) * c[static_cast<size_t>(j)] + sigmoid_ref(zi) * std::tanh(zg);
      h_new[static_cast<size_t>(j)] =
          sigmoid_ref(zo) * std::tanh(c_new[static_cast<size_t>(j)]);
    }
    h = h_new;
    c = c_new;
    hs.push_back(h);
  }
  return hs;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b));
}

}  // namespace

TEST_CASE("matvec matches the plain-loop reference exactly") {
  RandomStream g = substream(11, 0);
  for (const auto& [r, c] : {std::pair{1, 1}, {3, 5}, {64, 17}, {200, 301}}) {
    const Matrix w = random_matrix(r, c, g);
    const Vector x = random_vector(static_cast<size_t>(c), g);
    Vector y;
    matvec(w, x, y);
    CHECK(y == naive_matvec(w, x));
    Vector ys;
    matvec_serial(w, x, ys);
    CHECK(ys == y);
  }
}

TEST_CASE("matvec_transpose_add matches and accumulates") {
  RandomStream g = substream(12, 0);
  const Matrix w = random_matrix(40, 23, g);
  const Vector x = random_vector(40, g);
  const Vector base = random_vector(23, g);

  Vector expected = naive_matvec_transpose(w, x);
  for (size_t i = 0; i < expected.size(); ++i) expected[i] += base[i];

  Vector y = base;
  matvec_transpose_add(w, x, y);
  CHECK(y == expected);
  Vector ys = base;
  matvec_transpose_add_serial(w, x, ys);
  CHECK(ys == expected);
}

TEST_CASE("add_outer accumulates x y^T") {
  RandomStream g = substream(13, 0);
  const Vector x = random_vector(7, g);
  const Vector y = random_vector(4, g);
  Matrix w = random_matrix(7, 4, g);
  Matrix expected = w;
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 4; ++j) {
      expected(i, j) += x[static_cast<size_t>(i)] * y[static_cast<size_t>(j)];
    }
  }
  Matrix w2 = w;
  add_outer(w, x, y);
  CHECK(w.a == expected.a);
  add_outer_serial(w2, x, y);
  CHECK(w2.a == expected.a);
}

TEST_CASE("lstm_forward agrees with an independent scalar implementation") {
  RandomStream g = substream(14, 0);
  const int I = 3, H = 4, T = 6;
  LstmParams p(I, H);
  p.wx = random_matrix(4 * H, I, g);
  p.wh = random_matrix(4 * H, H, g);
  p.b = random_vector(static_cast<size_t>(4 * H), g);

  std::vector<Vector> xs;
  for (int t = 0; t < T; ++t) xs.push_back(random_vector(static_cast<size_t>(I), g));

  const LstmTrace trace = lstm_forward(p, xs);
  const std::vector<Vector> expected = reference_lstm(p, xs);
  REQUIRE(trace.h.size() == static_cast<size_t>(T));
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < H; ++j) {
      CHECK(trace.h[static_cast<size_t>(t)][static_cast<size_t>(j)] ==
            doctest::Approx(expected[static_cast<size_t>(t)][static_cast<size_t>(j)])
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("lstm_forward handles an empty sequence") {
  LstmParams p(2, 3);
  const LstmTrace trace = lstm_forward(p, {});
  CHECK(trace.h.empty());
  CHECK(trace.steps.empty());
}

TEST_CASE("lstm_backward gradients match finite differences") {
  RandomStream g = substream(15, 0);
  const int I = 3, H = 2, T = 4;
  LstmParams p(I, H);
  p.wx = random_matrix(4 * H, I, g);
  p.wh = random_matrix(4 * H, H, g);
  p.b = random_vector(static_cast<size_t>(4 * H), g);

  std::vector<Vector> xs;
  for (int t = 0; t < T; ++t) xs.push_back(random_vector(static_cast<size_t>(I), g));

  // L = sum_t <w_t, h_t> with fixed random weights; dL/dh_t = w_t.
  std::vector<Vector> dh_out;
  for (int t = 0; t < T; ++t) dh_out.push_back(random_vector(static_cast<size_t>(H), g));

  auto loss = [&](const LstmParams& params, const std::vector<Vector>& inputs) {
    const LstmTrace trace = lstm_forward(params, inputs);
    double L = 0.0;
    for (size_t t = 0; t < trace.h.size(); ++t) {
      for (size_t j = 0; j < trace.h[t].size(); ++j) L += dh_out[t][j] * trace.h[t][j];
    }
    return L;
  };

  const LstmTrace trace = lstm_forward(p, xs);
  LstmParams grads(I, H);
  const std::vector<Vector> dxs = lstm_backward(p, xs, trace, dh_out, grads);

  const double eps = 1e-6;
  double worst = 0.0;

  auto check_block = [&](double* param, double* grad, size_t n) {
    for (size_t i = 0; i < n; ++i) {
      const double keep = param[i];
      param[i] = keep + eps;
      const double up = loss(p, xs);
      param[i] = keep - eps;
      const double down = loss(p, xs);
      param[i] = keep;
      const double numeric = (up - down) / (2 * eps);
      worst = std::max(worst, rel_err(grad[i], numeric));
    }
  };

  check_block(p.wx.a.data(), grads.wx.a.data(), p.wx.a.size());
  check_block(p.wh.a.data(), grads.wh.a.data(), p.wh.a.size());
  check_block(p.b.data(), grads.b.data(), p.b.size());

  // input gradients
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < I; ++k) {
      const double keep = xs[static_cast<size_t>(t)][static_cast<size_t>(k)];
      xs[static_cast<size_t>(t)][static_cast<size_t>(k)] = keep + eps;
      const double up = loss(p, xs);
      xs[static_cast<size_t>(t)][static_cast<size_t>(k)] = keep - eps;
      const double down = loss(p, xs);
      xs[static_cast<size_t>(t)][static_cast<size_t>(k)] = keep;
      worst = std::max(worst,
                       rel_err(dxs[static_cast<size_t>(t)][static_cast<size_t>(k)],
                               (up - down) / (2 * eps)));
    }
  }

  CHECK(worst < 1e-6);
}
