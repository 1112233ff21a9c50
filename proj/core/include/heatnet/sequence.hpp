#pragma once

#include <functional>
#include <vector>

#include "heatnet/scene.hpp"
#include "heatnet/tensor.hpp"

namespace heatnet {

// GRU gate parameters, row-vector convention (y = x * W + h * U + b).
struct GruParams {
  Tensor w_update, u_update, b_update;  // [F_in,F_r], [F_r,F_r], [1,F_r]
  Tensor w_reset, u_reset, b_reset;
  Tensor w_cand, u_cand, b_cand;

  int input_width() const { return w_update.dim(0); }
  int hidden_width() const { return w_update.dim(1); }
  void validate() const;
};

// Runs the GRU recurrence over the rows of `history` from a zero initial
// hidden state and returns the final hidden state [1, F_r].
//   z = sigmoid(x W_z + h U_z + b_z)
//   r = sigmoid(x W_r + h U_r + b_r)
//   c = tanh(x W_c + (r . h) U_c + b_c)
//   h' = (1 - z) . h + z . c
Tensor gru_encode(const Tensor& history, const GruParams& params);

struct LstmDecoderParams {
  Tensor w_input, u_input, b_input;  // [F_x,F_d], [F_d,F_d], [1,F_d]
  Tensor w_forget, u_forget, b_forget;
  Tensor w_output, u_output, b_output;
  Tensor w_cand, u_cand, b_cand;
  Tensor w_proj, b_proj;  // [F_d,2], [1,2]

  int input_width() const { return w_input.dim(0); }
  int hidden_width() const { return w_input.dim(1); }
  void validate() const;
};

// Unrolls an LSTM for `steps` steps feeding the same concatenated channel
// feature [1, F_x] as the input at every step (zero initial hidden/cell);
// each hidden state is projected to a 2D position. Returns [steps, 2].
Tensor lstm_decode(const Tensor& feature, const LstmDecoderParams& params, int steps);

// Applies the type-matching op to each agent, preserving agent order. Every
// agent must be matched by exactly one of the two masks.
std::vector<Tensor> route_by_type(const std::vector<bool>& vehicle_mask,
                                  const std::vector<bool>& pedestrian_mask,
                                  const std::function<Tensor(int index, AgentType type)>& op);

}  // namespace heatnet
