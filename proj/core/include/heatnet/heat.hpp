#pragma once

#include <vector>

#include "heatnet/graph.hpp"
#include "heatnet/tensor.hpp"

namespace heatnet {

// One HEAT layer: node-type-specific projection, edge attribute/type
// projection, edge-enhanced masked attention, sigmoid-gated aggregation,
// multi-head concatenation. Matrices are stored for the row-vector
// convention: y = x * W, so a logical map (F_a -> F_b) is a [F_a, F_b] tensor.
struct HeatLayerParams {
  std::vector<Tensor> node_proj;  // one [F_h, F_p] per node type
  Tensor attr_proj;               // [kEdgeAttrWidth, F_phi]
  Tensor type_proj;               // [kEdgeTypeCount, F_chi]
  std::vector<Tensor> attn;       // per head: [2*F_p + F_phi + F_chi, 1]
  std::vector<Tensor> head_weight;  // per head: [F_phi + F_p, F_out / K]
  double leaky_slope = 0.2;

  int heads() const { return static_cast<int>(attn.size()); }
  int in_width() const { return node_proj.empty() ? 0 : node_proj[0].dim(0); }
  int proj_width() const { return node_proj.empty() ? 0 : node_proj[0].dim(1); }
  int attr_width() const { return attr_proj.dim(1); }
  int type_width() const { return type_proj.dim(1); }
  int out_width() const {
    return head_weight.empty() ? 0 : head_weight[0].dim(1) * heads();
  }
  void validate() const;  // throws ConfigError on inconsistent widths
};

// Row i = h_i * M_{type(i)}. Every node's type id must index node_proj.
Tensor project_nodes(const Tensor& node_features, const std::vector<int>& node_type_ids,
                     const std::vector<Tensor>& node_proj);

// Constant [E, kEdgeAttrWidth] / one-hot [E, kEdgeTypeCount] inputs of a graph.
Tensor edge_attr_matrix(const InteractionGraph& graph);
Tensor edge_type_onehot(const InteractionGraph& graph);

// Attention coefficients for one head, in edge order ([E, 1]): the masked
// softmax over each node's in-neighborhood of
// LeakyReLU(a^T [h_dst || e_attr || e_type || h_src]).
Tensor attention_coefficients(const InteractionGraph& graph, const Tensor& projected,
                              const Tensor& attr_projected, const Tensor& type_projected,
                              const Tensor& attn, double leaky_slope);

// Per-node update for one head: sigmoid of the alpha-weighted sum of
// W_h [e_attr || h_src] over the in-neighborhood. Returns [n, F_out/K].
Tensor aggregate(const InteractionGraph& graph, const Tensor& alpha,
                 const Tensor& projected, const Tensor& attr_projected,
                 const Tensor& head_weight);

Tensor heat_forward(const InteractionGraph& graph, const Tensor& node_features,
                    const std::vector<int>& node_type_ids, const HeatLayerParams& params);

// Sequential application; an empty stack is the identity.
Tensor heat_stack(const InteractionGraph& graph, const Tensor& node_features,
                  const std::vector<int>& node_type_ids,
                  const std::vector<HeatLayerParams>& layers);

}  // namespace heatnet
