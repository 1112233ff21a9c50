#include "heatnet/model.hpp"

#include <cmath>
#include <random>

namespace heatnet {

const char* variant_token(Variant v) {
  switch (v) {
    case Variant::kR: return "R";
    case Variant::kGat: return "GAT";
    case Variant::kGatR: return "GAT-R";
    case Variant::kHeat: return "HEAT";
    case Variant::kHeatR: return "HEAT-R";
    case Variant::kHeatIR: return "HEAT-I-R";
  }
  return "?";
}

Variant variant_from_token(const std::string& s) {
  if (s == "R") return Variant::kR;
  if (s == "GAT") return Variant::kGat;
  if (s == "GAT-R") return Variant::kGatR;
  if (s == "HEAT") return Variant::kHeat;
  if (s == "HEAT-R") return Variant::kHeatR;
  if (s == "HEAT-I-R") return Variant::kHeatIR;
  throw ConfigError("unknown variant '" + s +
                    "' (expected R, GAT, GAT-R, HEAT, HEAT-R, or HEAT-I-R)");
}

VariantChannels channels_of(Variant v) {
  switch (v) {
    case Variant::kR: return {true, false, false, false};
    case Variant::kGat: return {false, true, false, true};
    case Variant::kGatR: return {true, true, false, true};
    case Variant::kHeat: return {false, true, false, false};
    case Variant::kHeatR: return {true, true, false, false};
    case Variant::kHeatIR: return {true, true, true, false};
  }
  return {};
}

int ModelDims::cnn_flattened(int input_size) const {
  int s = input_size;
  for (int l = 0; l < 3; ++l) s = conv_out_size(s, 2);
  return s * s * cnn_channels[2];
}

int ModelDims::decoder_input_width(Variant v) const {
  const VariantChannels ch = channels_of(v);
  return (ch.dynamics ? dyn_hidden : 0) + (ch.interaction ? interaction_out : 0) +
         (ch.map ? map_feature : 0);
}

void ModelDims::validate(Variant v) const {
  const VariantChannels ch = channels_of(v);
  if (dyn_hidden < 1) throw ConfigError("dims: dyn_hidden must be positive");
  if (dec_hidden < 1) throw ConfigError("dims: dec_hidden must be positive");
  if (ch.interaction) {
    if (heads < 1) throw ConfigError("dims: heads must be positive");
    if (node_proj < 1) throw ConfigError("dims: node_proj must be positive");
    if (interaction_out < 1 || interaction_out % heads != 0) {
      throw ConfigError("dims: interaction_out (" + std::to_string(interaction_out) +
                        ") must be a positive multiple of heads (" + std::to_string(heads) + ")");
    }
    if (heat_layers < 1) throw ConfigError("dims: need at least one interaction layer");
    if (!ch.gat_mode && (edge_attr_proj < 0 || edge_type_proj < 0)) {
      throw ConfigError("dims: edge projections must be non-negative");
    }
  }
  if (ch.map) {
    if (map_feature < 1) throw ConfigError("dims: map_feature must be positive");
    if (map_size < 4) throw ConfigError("dims: map_size must be >= 4");
    for (int c : cnn_channels)
      if (c < 1) throw ConfigError("dims: cnn channels must be positive");
  }
}

// ---------------------------------------------------------------------------
// Parameter enumeration and initialization
// ---------------------------------------------------------------------------

namespace {

const char* type_tag(int t) { return t == 0 ? "vehicle" : "vru"; }

template <typename Self, typename Fn>
void visit_impl(Self& self, const Fn& fn) {
  const VariantChannels ch = channels_of(self.variant);
  for (int t = 0; t < kNumAgentTypes; ++t) {
    auto& e = self.encoders[static_cast<size_t>(t)];
    const std::string p = std::string("encoder.") + type_tag(t) + ".";
    fn(p + "w_update", e.w_update);
    fn(p + "u_update", e.u_update);
    fn(p + "b_update", e.b_update);
    fn(p + "w_reset", e.w_reset);
    fn(p + "u_reset", e.u_reset);
    fn(p + "b_reset", e.b_reset);
    fn(p + "w_cand", e.w_cand);
    fn(p + "u_cand", e.u_cand);
    fn(p + "b_cand", e.b_cand);
  }
  if (ch.interaction) {
    for (size_t l = 0; l < self.heat_layers.size(); ++l) {
      auto& layer = self.heat_layers[l];
      const std::string p = "heat." + std::to_string(l) + ".";
      for (size_t t = 0; t < layer.node_proj.size(); ++t) {
        fn(p + "node_proj." + std::to_string(t), layer.node_proj[t]);
      }
      fn(p + "attr_proj", layer.attr_proj);
      fn(p + "type_proj", layer.type_proj);
      for (size_t k = 0; k < layer.attn.size(); ++k) {
        fn(p + "attn." + std::to_string(k), layer.attn[k]);
        fn(p + "head_weight." + std::to_string(k), layer.head_weight[k]);
      }
    }
  }
  if (ch.map) {
    for (size_t l = 0; l < self.cnn.conv.size(); ++l) {
      const std::string p = "cnn.conv" + std::to_string(l) + ".";
      fn(p + "weight", self.cnn.conv[l].weight);
      fn(p + "bias", self.cnn.conv[l].bias);
    }
    fn("cnn.fc_weight", self.cnn.fc_weight);
    fn("cnn.fc_bias", self.cnn.fc_bias);
    fn("gate.weight", self.gate.weight);
    fn("gate.bias", self.gate.bias);
  }
  for (int t = 0; t < kNumAgentTypes; ++t) {
    auto& d = self.decoders[static_cast<size_t>(t)];
    const std::string p = std::string("decoder.") + type_tag(t) + ".";
    fn(p + "w_input", d.w_input);
    fn(p + "u_input", d.u_input);
    fn(p + "b_input", d.b_input);
    fn(p + "w_forget", d.w_forget);
    fn(p + "u_forget", d.u_forget);
    fn(p + "b_forget", d.b_forget);
    fn(p + "w_output", d.w_output);
    fn(p + "u_output", d.u_output);
    fn(p + "b_output", d.b_output);
    fn(p + "w_cand", d.w_cand);
    fn(p + "u_cand", d.u_cand);
    fn(p + "b_cand", d.b_cand);
    fn(p + "w_proj", d.w_proj);
    fn(p + "b_proj", d.b_proj);
  }
}

}  // namespace

void ModelParams::visit(const std::function<void(const std::string&, Tensor&)>& fn) {
  visit_impl(*this, fn);
}

void ModelParams::visit(const std::function<void(const std::string&, const Tensor&)>& fn) const {
  visit_impl(*this, fn);
}

int64_t ModelParams::parameter_count() const {
  int64_t n = 0;
  visit([&](const std::string&, const Tensor& t) { n += t.size(); });
  return n;
}

namespace {

Tensor xavier(int rows, int cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  std::vector<double> v(static_cast<size_t>(rows) * cols);
  for (auto& x : v) x = dist(rng);
  return Tensor({rows, cols}, std::move(v));
}

GruParams init_gru(int f_in, int f_h, std::mt19937_64& rng) {
  GruParams p;
  p.w_update = xavier(f_in, f_h, rng);
  p.u_update = xavier(f_h, f_h, rng);
  p.b_update = Tensor::zeros({1, f_h});
  p.w_reset = xavier(f_in, f_h, rng);
  p.u_reset = xavier(f_h, f_h, rng);
  p.b_reset = Tensor::zeros({1, f_h});
  p.w_cand = xavier(f_in, f_h, rng);
  p.u_cand = xavier(f_h, f_h, rng);
  p.b_cand = Tensor::zeros({1, f_h});
  return p;
}

LstmDecoderParams init_lstm(int f_x, int f_d, std::mt19937_64& rng) {
  LstmDecoderParams p;
  p.w_input = xavier(f_x, f_d, rng);
  p.u_input = xavier(f_d, f_d, rng);
  p.b_input = Tensor::zeros({1, f_d});
  p.w_forget = xavier(f_x, f_d, rng);
  p.u_forget = xavier(f_d, f_d, rng);
  p.b_forget = Tensor::full({1, f_d}, 1.0);  // start remembering
  p.w_output = xavier(f_x, f_d, rng);
  p.u_output = xavier(f_d, f_d, rng);
  p.b_output = Tensor::zeros({1, f_d});
  p.w_cand = xavier(f_x, f_d, rng);
  p.u_cand = xavier(f_d, f_d, rng);
  p.b_cand = Tensor::zeros({1, f_d});
  p.w_proj = xavier(f_d, 2, rng);
  p.b_proj = Tensor::zeros({1, 2});
  return p;
}

HeatLayerParams init_heat_layer(int f_h, const ModelDims& dims, bool gat_mode,
                                std::mt19937_64& rng) {
  HeatLayerParams p;
  p.leaky_slope = dims.leaky_slope;
  const int f_phi = gat_mode ? 0 : dims.edge_attr_proj;
  const int f_chi = gat_mode ? 0 : dims.edge_type_proj;
  const int num_types = gat_mode ? 1 : kNumAgentTypes;
  for (int t = 0; t < num_types; ++t) p.node_proj.push_back(xavier(f_h, dims.node_proj, rng));
  p.attr_proj = f_phi > 0 ? xavier(kEdgeAttrWidth, f_phi, rng)
                          : Tensor::zeros({kEdgeAttrWidth, 0});
  p.type_proj = f_chi > 0 ? xavier(kEdgeTypeCount, f_chi, rng)
                          : Tensor::zeros({kEdgeTypeCount, 0});
  const int attn_width = 2 * dims.node_proj + f_phi + f_chi;
  const int per_head = dims.interaction_out / dims.heads;
  for (int k = 0; k < dims.heads; ++k) {
    p.attn.push_back(xavier(attn_width, 1, rng));
    p.head_weight.push_back(xavier(f_phi + dims.node_proj, per_head, rng));
  }
  return p;
}

}  // namespace

ModelParams init_model(Variant variant, const ModelDims& dims, int history_steps,
                       int future_steps, uint64_t seed) {
  dims.validate(variant);
  if (history_steps < 1 || future_steps < 1) {
    throw ConfigError("init_model: horizons must be positive");
  }
  const VariantChannels ch = channels_of(variant);
  std::mt19937_64 rng(seed);
  ModelParams p;
  p.variant = variant;
  p.dims = dims;
  p.history_steps = history_steps;
  p.future_steps = future_steps;
  for (int t = 0; t < kNumAgentTypes; ++t) {
    p.encoders[static_cast<size_t>(t)] = init_gru(kHistoryInputWidth, dims.dyn_hidden, rng);
  }
  if (ch.interaction) {
    for (int l = 0; l < dims.heat_layers; ++l) {
      const int f_h = l == 0 ? dims.dyn_hidden : dims.interaction_out;
      p.heat_layers.push_back(init_heat_layer(f_h, dims, ch.gat_mode, rng));
    }
  }
  if (ch.map) {
    int c_in = 1;
    int size = dims.map_size;
    for (int l = 0; l < 3; ++l) {
      const int c_out = dims.cnn_channels[static_cast<size_t>(l)];
      p.cnn.conv[static_cast<size_t>(l)].weight = xavier(9 * c_in, c_out, rng);
      p.cnn.conv[static_cast<size_t>(l)].bias = Tensor::zeros({1, c_out});
      c_in = c_out;
      size = conv_out_size(size, 2);
    }
    p.cnn.fc_weight = xavier(size * size * c_in, dims.map_feature, rng);
    p.cnn.fc_bias = Tensor::zeros({1, dims.map_feature});
    p.cnn.input_size = dims.map_size;
    p.cnn.leaky_slope = dims.leaky_slope;
    p.gate.weight = xavier(dims.map_feature + kMapAttrWidth, dims.map_feature, rng);
    p.gate.bias = Tensor::zeros({1, dims.map_feature});
  }
  const int dec_in = dims.decoder_input_width(variant);
  for (int t = 0; t < kNumAgentTypes; ++t) {
    p.decoders[static_cast<size_t>(t)] = init_lstm(dec_in, dims.dec_hidden, rng);
  }
  return p;
}

ModelParams track_params(Tape& tape, const ModelParams& params,
                         std::vector<std::pair<std::string, int>>* leaf_nodes) {
  ModelParams tracked = params;
  tracked.visit([&](const std::string& name, Tensor& t) {
    t = tape.watch(t);
    if (leaf_nodes) leaf_nodes->emplace_back(name, t.node());
  });
  return tracked;
}

// ---------------------------------------------------------------------------
// Forward pass
// ---------------------------------------------------------------------------

std::vector<std::vector<std::array<double, 2>>> PredictionSet::local_values() const {
  std::vector<std::vector<std::array<double, 2>>> out;
  out.reserve(trajectories.size());
  for (const auto& traj : trajectories) {
    std::vector<std::array<double, 2>> t;
    t.reserve(static_cast<size_t>(traj.dim(0)));
    for (int k = 0; k < traj.dim(0); ++k) t.push_back({traj.at(k, 0), traj.at(k, 1)});
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::vector<std::array<double, 2>>> PredictionSet::global_values(
    const SceneSample& sample) const {
  auto local = local_values();
  for (size_t i = 0; i < local.size(); ++i) {
    const AgentState& anchor = sample.current[static_cast<size_t>(target_indices[i])];
    for (auto& p : local[i]) p = local_to_global(anchor, p[0], p[1]);
  }
  return local;
}

PredictionSet forward(const SceneSample& sample, const InteractionGraph& graph,
                      const ModelParams& params, const MapRaster* raster,
                      ForwardTrace* trace) {
  const VariantChannels ch = channels_of(params.variant);
  const int n = sample.agent_count();
  if (ch.interaction && graph.node_count != n) {
    throw ConfigError("forward: graph has " + std::to_string(graph.node_count) +
                      " nodes for " + std::to_string(n) + " agents");
  }

  // Dynamics channel (also the interaction channel's node features).
  const std::vector<Tensor> dynamics = route_by_type(
      sample.vehicle_mask, sample.pedestrian_mask, [&](int i, AgentType type) {
        return gru_encode(sample.history_matrix(i),
                          params.encoders[static_cast<size_t>(static_cast<int>(type))]);
      });
  if (trace && ch.dynamics) trace->dynamics = dynamics;

  Tensor interaction;  // [n, F'_h]
  if (ch.interaction) {
    const Tensor node_features =
        dynamics.size() == 1 ? dynamics[0] : concat(dynamics, 0);
    const std::vector<int> type_ids =
        ch.gat_mode ? std::vector<int>(static_cast<size_t>(n), 0) : graph.node_type_ids();
    interaction = heat_stack(graph, node_features, type_ids, params.heat_layers);
    if (trace) trace->interaction = interaction;
  }

  Tensor map_feature;  // [1, F_map], shared by all agents in the scene
  if (ch.map) {
    if (!raster) throw ConfigError("forward: variant " + std::string(variant_token(params.variant)) +
                                   " needs a map raster");
    map_feature = encode_map(*raster, params.cnn);
    if (trace) {
      ++trace->encode_map_calls;
      trace->map_feature = map_feature;
    }
  }

  PredictionSet out;
  out.target_indices = sample.target_indices();
  for (int idx : out.target_indices) {
    std::vector<Tensor> channels;
    if (ch.dynamics) channels.push_back(dynamics[static_cast<size_t>(idx)]);
    if (ch.interaction) channels.push_back(take_rows(interaction, {idx}));
    if (ch.map) {
      Tensor gated = gate_select(map_feature, sample.map_attrs[static_cast<size_t>(idx)],
                                 params.gate);
      if (trace) trace->gated_map.push_back(gated);
      channels.push_back(std::move(gated));
    }
    const Tensor feature = channels.size() == 1 ? channels[0] : concat(channels, 1);
    const int type = static_cast<int>(sample.agent_types[static_cast<size_t>(idx)]);
    out.trajectories.push_back(
        lstm_decode(feature, params.decoders[static_cast<size_t>(type)], sample.future_steps));
  }
  return out;
}

Tensor mse_loss(const PredictionSet& pred, const SceneSample& sample) {
  if (pred.target_count() != static_cast<int>(sample.target_indices().size())) {
    throw DimensionError("mse_loss: " + std::to_string(pred.target_count()) +
                         " predictions vs " +
                         std::to_string(sample.target_indices().size()) + " targets");
  }
  if (pred.target_count() == 0) throw DimensionError("mse_loss: no targets");
  Tensor total = Tensor::scalar(0.0);
  int64_t count = 0;
  for (int i = 0; i < pred.target_count(); ++i) {
    const int idx = pred.target_indices[static_cast<size_t>(i)];
    const auto& truth = sample.futures[static_cast<size_t>(idx)];
    const Tensor& traj = pred.trajectories[static_cast<size_t>(i)];
    if (static_cast<int>(truth.size()) != traj.dim(0)) {
      throw DimensionError("mse_loss: horizon mismatch: predicted " +
                           std::to_string(traj.dim(0)) + " steps, truth has " +
                           std::to_string(truth.size()));
    }
    std::vector<double> tv;
    tv.reserve(truth.size() * 2);
    for (const auto& p : truth) {
      tv.push_back(p[0]);
      tv.push_back(p[1]);
    }
    const Tensor diff = traj - Tensor({traj.dim(0), 2}, std::move(tv));
    total = total + sum(mul(diff, diff));
    count += static_cast<int64_t>(truth.size());  // per-step squared Euclidean error
  }
  return total * (1.0 / static_cast<double>(count));
}

}  // namespace heatnet
