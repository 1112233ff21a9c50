#include "heatnet/heat.hpp"

#include <string>

namespace heatnet {

void HeatLayerParams::validate() const {
  if (node_proj.empty()) throw ConfigError("heat layer: no node projection matrices");
  if (attn.empty()) throw ConfigError("heat layer: no attention heads");
  if (attn.size() != head_weight.size()) {
    throw ConfigError("heat layer: " + std::to_string(attn.size()) + " attention vectors vs " +
                      std::to_string(head_weight.size()) + " head weights");
  }
  const int fh = in_width(), fp = proj_width();
  for (const auto& m : node_proj) {
    if (m.rank() != 2 || m.dim(0) != fh || m.dim(1) != fp) {
      throw ConfigError("heat layer: node projections disagree on widths");
    }
  }
  if (attr_proj.rank() != 2 || attr_proj.dim(0) != kEdgeAttrWidth) {
    throw ConfigError("heat layer: attr projection must be [" +
                      std::to_string(kEdgeAttrWidth) + ", F_phi]");
  }
  if (type_proj.rank() != 2 || type_proj.dim(0) != kEdgeTypeCount) {
    throw ConfigError("heat layer: type projection must be [" +
                      std::to_string(kEdgeTypeCount) + ", F_chi]");
  }
  const int attn_width = 2 * fp + attr_width() + type_width();
  for (const auto& a : attn) {
    if (a.rank() != 2 || a.dim(0) != attn_width || a.dim(1) != 1) {
      throw ConfigError("heat layer: attention vector must be [" +
                        std::to_string(attn_width) + ", 1], got " + shape_str(a.shape()));
    }
  }
  const int agg_in = attr_width() + fp;
  const int per_head = head_weight[0].dim(1);
  for (const auto& w : head_weight) {
    if (w.rank() != 2 || w.dim(0) != agg_in || w.dim(1) != per_head) {
      throw ConfigError("heat layer: head weight must be [" + std::to_string(agg_in) + ", " +
                        std::to_string(per_head) + "], got " + shape_str(w.shape()));
    }
  }
}

Tensor project_nodes(const Tensor& node_features, const std::vector<int>& node_type_ids,
                     const std::vector<Tensor>& node_proj) {
  if (node_features.rank() != 2) {
    throw DimensionError("project_nodes: node features must be rank 2, got " +
                         shape_str(node_features.shape()));
  }
  const int n = node_features.dim(0);
  if (static_cast<int>(node_type_ids.size()) != n) {
    throw ConfigError("project_nodes: " + std::to_string(node_type_ids.size()) +
                      " type ids for " + std::to_string(n) + " nodes");
  }
  const int num_types = static_cast<int>(node_proj.size());
  // Batch per type, then restore original row order with a gather.
  std::vector<std::vector<int>> rows_of_type(static_cast<size_t>(num_types));
  for (int i = 0; i < n; ++i) {
    const int t = node_type_ids[static_cast<size_t>(i)];
    if (t < 0 || t >= num_types) {
      throw ConfigError("project_nodes: node " + std::to_string(i) + " has unknown type " +
                        std::to_string(t));
    }
    rows_of_type[static_cast<size_t>(t)].push_back(i);
  }
  std::vector<Tensor> blocks;
  std::vector<int> position(static_cast<size_t>(n));
  int offset = 0;
  for (int t = 0; t < num_types; ++t) {
    const auto& rows = rows_of_type[static_cast<size_t>(t)];
    if (rows.empty()) continue;
    blocks.push_back(matmul(take_rows(node_features, rows), node_proj[static_cast<size_t>(t)]));
    for (int r : rows) position[static_cast<size_t>(r)] = offset++;
  }
  Tensor stacked = blocks.size() == 1 ? blocks[0] : concat(blocks, 0);
  return take_rows(stacked, position);
}

Tensor edge_attr_matrix(const InteractionGraph& graph) {
  std::vector<double> v;
  v.reserve(static_cast<size_t>(graph.edge_count()) * kEdgeAttrWidth);
  for (const auto& attr : graph.edge_attrs)
    for (double x : attr) v.push_back(x);
  return Tensor({graph.edge_count(), kEdgeAttrWidth}, std::move(v));
}

Tensor edge_type_onehot(const InteractionGraph& graph) {
  std::vector<double> v(static_cast<size_t>(graph.edge_count()) * kEdgeTypeCount, 0.0);
  for (int e = 0; e < graph.edge_count(); ++e) {
    v[static_cast<size_t>(e) * kEdgeTypeCount +
      static_cast<size_t>(graph.edge_type_ids[static_cast<size_t>(e)])] = 1.0;
  }
  return Tensor({graph.edge_count(), kEdgeTypeCount}, std::move(v));
}

Tensor attention_coefficients(const InteractionGraph& graph, const Tensor& projected,
                              const Tensor& attr_projected, const Tensor& type_projected,
                              const Tensor& attn, double leaky_slope) {
  std::vector<int> src(static_cast<size_t>(graph.edge_count()));
  std::vector<int> dst(static_cast<size_t>(graph.edge_count()));
  for (int e = 0; e < graph.edge_count(); ++e) {
    src[static_cast<size_t>(e)] = graph.edges[static_cast<size_t>(e)].first;
    dst[static_cast<size_t>(e)] = graph.edges[static_cast<size_t>(e)].second;
  }
  const Tensor h_dst = take_rows(projected, dst);
  const Tensor h_src = take_rows(projected, src);
  const Tensor features = concat({h_dst, attr_projected, type_projected, h_src}, 1);
  const Tensor logits = leaky_relu(matmul(features, attn), leaky_slope);  // [E, 1]

  std::vector<Tensor> per_node;
  per_node.reserve(static_cast<size_t>(graph.node_count));
  for (int i = 0; i < graph.node_count; ++i) {
    const auto& in = graph.in_edges[static_cast<size_t>(i)];
    if (in.empty()) {
      throw EmptyNeighborhoodError("node " + std::to_string(i) + " has no in-edges");
    }
    const Tensor node_logits = reshape(take_rows(logits, in), {static_cast<int>(in.size())});
    const Tensor alpha = softmax_masked(node_logits, std::vector<bool>(in.size(), true));
    per_node.push_back(reshape(alpha, {static_cast<int>(in.size()), 1}));
  }
  // in_edges runs are contiguous and cover the edge list in order, so the
  // node-order concat is the per-edge vector.
  return per_node.size() == 1 ? per_node[0] : concat(per_node, 0);
}

Tensor aggregate(const InteractionGraph& graph, const Tensor& alpha, const Tensor& projected,
                 const Tensor& attr_projected, const Tensor& head_weight) {
  std::vector<int> src(static_cast<size_t>(graph.edge_count()));
  for (int e = 0; e < graph.edge_count(); ++e) {
    src[static_cast<size_t>(e)] = graph.edges[static_cast<size_t>(e)].first;
  }
  // Edge-integrated features W_h [e_attr || h_src], per edge.
  const Tensor h_src = take_rows(projected, src);
  const Tensor integrated = matmul(concat({attr_projected, h_src}, 1), head_weight);  // [E, F]
  const int f = integrated.dim(1);

  std::vector<Tensor> per_node;
  per_node.reserve(static_cast<size_t>(graph.node_count));
  const Tensor ones_feature = Tensor::full({1, f}, 1.0);
  for (int i = 0; i < graph.node_count; ++i) {
    const auto& in = graph.in_edges[static_cast<size_t>(i)];
    const int deg = static_cast<int>(in.size());
    const Tensor rows = take_rows(integrated, in);  // [deg, F]
    const Tensor alphas = take_rows(alpha, in);     // [deg, 1]
    const Tensor weighted = mul(rows, matmul(alphas, ones_feature));
    per_node.push_back(matmul(Tensor::full({1, deg}, 1.0), weighted));  // sum over neighbors
  }
  const Tensor stacked = per_node.size() == 1 ? per_node[0] : concat(per_node, 0);
  return sigmoid(stacked);
}

Tensor heat_forward(const InteractionGraph& graph, const Tensor& node_features,
                    const std::vector<int>& node_type_ids, const HeatLayerParams& params) {
  params.validate();
  if (node_features.dim(1) != params.in_width()) {
    throw ConfigError("heat_forward: node feature width " + std::to_string(node_features.dim(1)) +
                      " vs layer input width " + std::to_string(params.in_width()));
  }
  const Tensor projected = project_nodes(node_features, node_type_ids, params.node_proj);
  const Tensor attr_projected = matmul(edge_attr_matrix(graph), params.attr_proj);
  const Tensor type_projected = matmul(edge_type_onehot(graph), params.type_proj);

  std::vector<Tensor> head_outputs;
  head_outputs.reserve(static_cast<size_t>(params.heads()));
  for (int k = 0; k < params.heads(); ++k) {
    const Tensor alpha = attention_coefficients(graph, projected, attr_projected,
                                                type_projected, params.attn[static_cast<size_t>(k)],
                                                params.leaky_slope);
    head_outputs.push_back(aggregate(graph, alpha, projected, attr_projected,
                                     params.head_weight[static_cast<size_t>(k)]));
  }
  return head_outputs.size() == 1 ? head_outputs[0] : concat(head_outputs, 1);
}

Tensor heat_stack(const InteractionGraph& graph, const Tensor& node_features,
                  const std::vector<int>& node_type_ids,
                  const std::vector<HeatLayerParams>& layers) {
  Tensor h = node_features;
  for (size_t l = 0; l < layers.size(); ++l) {
    if (h.dim(1) != layers[l].in_width()) {
      throw ConfigError("heat_stack: layer " + std::to_string(l) + " expects width " +
                        std::to_string(layers[l].in_width()) + ", got " +
                        std::to_string(h.dim(1)));
    }
    h = heat_forward(graph, h, node_type_ids, layers[l]);
  }
  return h;
}

}  // namespace heatnet
