#include "heatnet/sequence.hpp"

#include <string>

namespace heatnet {

namespace {

void check_gate(const Tensor& w, const Tensor& u, const Tensor& b, int f_in, int f_h,
                const char* which) {
  if (w.rank() != 2 || w.dim(0) != f_in || w.dim(1) != f_h ||
      u.rank() != 2 || u.dim(0) != f_h || u.dim(1) != f_h ||
      b.rank() != 2 || b.dim(0) != 1 || b.dim(1) != f_h) {
    throw DimensionError(std::string(which) + " gate widths inconsistent: W " +
                         shape_str(w.shape()) + ", U " + shape_str(u.shape()) + ", b " +
                         shape_str(b.shape()));
  }
}

}  // namespace

void GruParams::validate() const {
  const int f_in = input_width(), f_h = hidden_width();
  check_gate(w_update, u_update, b_update, f_in, f_h, "update");
  check_gate(w_reset, u_reset, b_reset, f_in, f_h, "reset");
  check_gate(w_cand, u_cand, b_cand, f_in, f_h, "candidate");
}

Tensor gru_encode(const Tensor& history, const GruParams& params) {
  params.validate();
  if (history.rank() != 2 || history.dim(1) != params.input_width()) {
    throw DimensionError("gru_encode: history " + shape_str(history.shape()) +
                         " vs input width " + std::to_string(params.input_width()));
  }
  const int steps = history.dim(0);
  if (steps < 1) throw DimensionError("gru_encode: empty history");
  Tensor h = Tensor::zeros({1, params.hidden_width()});
  for (int t = 0; t < steps; ++t) {
    const Tensor x = take_rows(history, {t});
    const Tensor z = sigmoid(matmul(x, params.w_update) + matmul(h, params.u_update) +
                             params.b_update);
    const Tensor r = sigmoid(matmul(x, params.w_reset) + matmul(h, params.u_reset) +
                             params.b_reset);
    const Tensor c = tanh(matmul(x, params.w_cand) + matmul(mul(r, h), params.u_cand) +
                          params.b_cand);
    h = mul(1.0 - z, h) + mul(z, c);
  }
  return h;
}

void LstmDecoderParams::validate() const {
  const int f_x = input_width(), f_d = hidden_width();
  check_gate(w_input, u_input, b_input, f_x, f_d, "input");
  check_gate(w_forget, u_forget, b_forget, f_x, f_d, "forget");
  check_gate(w_output, u_output, b_output, f_x, f_d, "output");
  check_gate(w_cand, u_cand, b_cand, f_x, f_d, "candidate");
  if (w_proj.rank() != 2 || w_proj.dim(0) != f_d || w_proj.dim(1) != 2 ||
      b_proj.rank() != 2 || b_proj.dim(0) != 1 || b_proj.dim(1) != 2) {
    throw DimensionError("decoder projection widths inconsistent: W " +
                         shape_str(w_proj.shape()) + ", b " + shape_str(b_proj.shape()));
  }
}

Tensor lstm_decode(const Tensor& feature, const LstmDecoderParams& params, int steps) {
  params.validate();
  if (feature.rank() != 2 || feature.dim(0) != 1 || feature.dim(1) != params.input_width()) {
    throw DimensionError("lstm_decode: feature " + shape_str(feature.shape()) +
                         " vs input width " + std::to_string(params.input_width()));
  }
  if (steps < 1) throw DimensionError("lstm_decode: steps must be >= 1");
  Tensor h = Tensor::zeros({1, params.hidden_width()});
  Tensor c = Tensor::zeros({1, params.hidden_width()});
  std::vector<Tensor> positions;
  positions.reserve(static_cast<size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    const Tensor i = sigmoid(matmul(feature, params.w_input) + matmul(h, params.u_input) +
                             params.b_input);
    const Tensor f = sigmoid(matmul(feature, params.w_forget) + matmul(h, params.u_forget) +
                             params.b_forget);
    const Tensor o = sigmoid(matmul(feature, params.w_output) + matmul(h, params.u_output) +
                             params.b_output);
    const Tensor g = tanh(matmul(feature, params.w_cand) + matmul(h, params.u_cand) +
                          params.b_cand);
    c = mul(f, c) + mul(i, g);
    h = mul(o, tanh(c));
    positions.push_back(matmul(h, params.w_proj) + params.b_proj);
  }
  return positions.size() == 1 ? positions[0] : concat(positions, 0);
}

std::vector<Tensor> route_by_type(const std::vector<bool>& vehicle_mask,
                                  const std::vector<bool>& pedestrian_mask,
                                  const std::function<Tensor(int index, AgentType type)>& op) {
  if (vehicle_mask.size() != pedestrian_mask.size()) {
    throw MaskError("type masks disagree on agent count: " +
                    std::to_string(vehicle_mask.size()) + " vs " +
                    std::to_string(pedestrian_mask.size()));
  }
  std::vector<Tensor> out;
  out.reserve(vehicle_mask.size());
  for (size_t i = 0; i < vehicle_mask.size(); ++i) {
    const bool v = vehicle_mask[i], p = pedestrian_mask[i];
    if (v == p) {
      throw MaskError("agent " + std::to_string(i) +
                      (v ? " matches both type masks" : " matches no type mask"));
    }
    out.push_back(op(static_cast<int>(i),
                     v ? AgentType::kVehicle : AgentType::kPedestrianBicycle));
  }
  return out;
}

}  // namespace heatnet
