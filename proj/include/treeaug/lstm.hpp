// Single-direction LSTM forward/backward over a sequence of input vectors.
//
// Standard cell with input, forget and output gates and a tanh candidate:
//   z_t = Wx x_t + Wh h_{t-1} + b          (4H rows, gate order i,f,g,o)
//   c_t = f_t * c_{t-1} + i_t * g_t
//   h_t = o_t * tanh(c_t)
// Initial h and c are zero. The backward pass consumes the forward trace and
// accumulates exact gradients.

#pragma once

#include <vector>

#include "treeaug/linalg.hpp"

namespace treeaug {

struct LstmParams {
  Matrix wx;  // 4H x I
  Matrix wh;  // 4H x H
  Vector b;   // 4H

  LstmParams() = default;
  LstmParams(int input_dim, int hidden_dim)
      : wx(4 * hidden_dim, input_dim), wh(4 * hidden_dim, hidden_dim),
        b(static_cast<size_t>(4 * hidden_dim), 0.0) {}
  int hidden() const { return wh.cols; }
  int input() const { return wx.cols; }
};

struct LstmStep {
  Vector gates;   // 4H, post-activation: [i f g o]
  Vector c;       // cell state after the step
  Vector tanh_c;
};

struct LstmTrace {
  std::vector<LstmStep> steps;
  std::vector<Vector> h;  // hidden state per step
};

LstmTrace lstm_forward(const LstmParams& p, const std::vector<Vector>& xs);

// dh_out[t] is the loss gradient flowing into h_t from outside the chain
// (zero vectors where no output is consumed). Parameter gradients accumulate
// into `grads`; the return value is dLoss/dx_t per step.
std::vector<Vector> lstm_backward(const LstmParams& p, const std::vector<Vector>& xs,
                                  const LstmTrace& trace, const std::vector<Vector>& dh_out,
                                  LstmParams& grads);

}  // namespace treeaug
