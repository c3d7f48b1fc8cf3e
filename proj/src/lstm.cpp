#include "treeaug/lstm.hpp"

#include <cmath>

namespace treeaug {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmTrace lstm_forward(const LstmParams& p, const std::vector<Vector>& xs) {
  const int h_dim = p.hidden();
  LstmTrace trace;
  trace.steps.resize(xs.size());
  trace.h.resize(xs.size());

  Vector h_prev(static_cast<size_t>(h_dim), 0.0);
  Vector c_prev(static_cast<size_t>(h_dim), 0.0);
  Vector z;
  Vector tmp;
  for (size_t t = 0; t < xs.size(); ++t) {
    matvec(p.wx, xs[t], z);
    matvec(p.wh, h_prev, tmp);
    for (size_t i = 0; i < z.size(); ++i) z[i] += tmp[i] + p.b[i];

    LstmStep& step = trace.steps[t];
    step.gates.resize(static_cast<size_t>(4 * h_dim));
    step.c.resize(static_cast<size_t>(h_dim));
    step.tanh_c.resize(static_cast<size_t>(h_dim));
    Vector h(static_cast<size_t>(h_dim));
    for (int j = 0; j < h_dim; ++j) {
      const double gi = sigmoid(z[static_cast<size_t>(j)]);
      const double gf = sigmoid(z[static_cast<size_t>(h_dim + j)]);
      const double gg = std::tanh(z[static_cast<size_t>(2 * h_dim + j)]);
      const double go = sigmoid(z[static_cast<size_t>(3 * h_dim + j)]);
      step.gates[static_cast<size_t>(j)] = gi;
      step.gates[static_cast<size_t>(h_dim + j)] = gf;
      step.gates[static_cast<size_t>(2 * h_dim + j)] = gg;
      step.gates[static_cast<size_t>(3 * h_dim + j)] = go;
      const double c = gf * c_prev[static_cast<size_t>(j)] + gi * gg;
      step.c[static_cast<size_t>(j)] = c;
      step.tanh_c[static_cast<size_t>(j)] = std::tanh(c);
      h[static_cast<size_t>(j)] = go * step.tanh_c[static_cast<size_t>(j)];
    }
    trace.h[t] = h;
    h_prev = std::move(h);
    c_prev = step.c;
  }
  return trace;
}

std::vector<Vector> lstm_backward(const LstmParams& p, const std::vector<Vector>& xs,
                                  const LstmTrace& trace, const std::vector<Vector>& dh_out,
                                  LstmParams& grads) {
  const int h_dim = p.hidden();
  const size_t steps = xs.size();
  std::vector<Vector> dxs(steps);

  Vector dh(static_cast<size_t>(h_dim), 0.0);  // recurrent gradient into h_t
  Vector dc(static_cast<size_t>(h_dim), 0.0);
  Vector dz(static_cast<size_t>(4 * h_dim));
  const Vector zeros(static_cast<size_t>(h_dim), 0.0);
  for (size_t ti = steps; ti-- > 0;) {
    const LstmStep& step = trace.steps[ti];
    const Vector& c_prev = ti == 0 ? zeros : trace.steps[ti - 1].c;
    for (int j = 0; j < h_dim; ++j) {
      const double dh_total = dh[static_cast<size_t>(j)] + dh_out[ti][static_cast<size_t>(j)];
      const double gi = step.gates[static_cast<size_t>(j)];
      const double gf = step.gates[static_cast<size_t>(h_dim + j)];
      const double gg = step.gates[static_cast<size_t>(2 * h_dim + j)];
      const double go = step.gates[static_cast<size_t>(3 * h_dim + j)];
      const double tc = step.tanh_c[static_cast<size_t>(j)];

      const double dct = dc[static_cast<size_t>(j)] + dh_total * go * (1.0 - tc * tc);
      const double d_i = dct * gg;
      const double d_f = dct * c_prev[static_cast<size_t>(j)];
      const double d_g = dct * gi;
      const double d_o = dh_total * tc;

      dz[static_cast<size_t>(j)] = d_i * gi * (1.0 - gi);
      dz[static_cast<size_t>(h_dim + j)] = d_f * gf * (1.0 - gf);
      dz[static_cast<size_t>(2 * h_dim + j)] = d_g * (1.0 - gg * gg);
      dz[static_cast<size_t>(3 * h_dim + j)] = d_o * go * (1.0 - go);

      dc[static_cast<size_t>(j)] = dct * gf;  // becomes dc_{t-1}
    }

    add_outer(grads.wx, dz, xs[ti]);
    if (ti > 0) add_outer(grads.wh, dz, trace.h[ti - 1]);
    add_inplace(grads.b, dz);

    dxs[ti].assign(xs[ti].size(), 0.0);
    matvec_transpose_add(p.wx, dz, dxs[ti]);
    dh.assign(static_cast<size_t>(h_dim), 0.0);
    if (ti > 0) matvec_transpose_add(p.wh, dz, dh);
  }
  return dxs;
}

}  // namespace treeaug
