#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "heatnet/graph.hpp"
#include "heatnet/heat.hpp"
#include "heatnet/map_channel.hpp"
#include "heatnet/scene.hpp"
#include "heatnet/sequence.hpp"

namespace heatnet {

enum class Variant { kR, kGat, kGatR, kHeat, kHeatR, kHeatIR };

const char* variant_token(Variant v);  // "R" | "GAT" | "GAT-R" | "HEAT" | "HEAT-R" | "HEAT-I-R"
Variant variant_from_token(const std::string& s);  // throws ConfigError

// Which channels feed the decoder, and whether the interaction encoder runs
// in its GAT reduction (single node type, zero-width edge projections).
struct VariantChannels {
  bool dynamics = false;
  bool interaction = false;
  bool map = false;
  bool gat_mode = false;
};
VariantChannels channels_of(Variant v);

struct ModelDims {
  int dyn_hidden = 64;        // F_r
  int node_proj = 32;         // F_p
  int edge_attr_proj = 8;     // F_phi (forced to 0 in GAT mode)
  int edge_type_proj = 8;     // F_chi (forced to 0 in GAT mode)
  int heads = 3;              // K
  int interaction_out = 48;   // F'_h, divisible by heads
  int heat_layers = 2;
  int map_size = 64;
  int map_feature = 32;       // F_map
  std::array<int, 3> cnn_channels = {8, 16, 32};
  int dec_hidden = 128;       // F_d
  double leaky_slope = 0.2;

  void validate(Variant v) const;  // throws ConfigError
  int decoder_input_width(Variant v) const;
  int cnn_flattened(int input_size) const;
};

struct ModelParams {
  Variant variant = Variant::kHeatIR;
  ModelDims dims;
  int history_steps = 10;
  int future_steps = 30;

  std::array<GruParams, kNumAgentTypes> encoders;
  std::vector<HeatLayerParams> heat_layers;
  CnnParams cnn;
  GateParams gate;
  std::array<LstmDecoderParams, kNumAgentTypes> decoders;

  // Enumerates every learnable tensor with a stable name, in a stable order.
  void visit(const std::function<void(const std::string&, Tensor&)>& fn);
  void visit(const std::function<void(const std::string&, const Tensor&)>& fn) const;
  int64_t parameter_count() const;
};

ModelParams init_model(Variant variant, const ModelDims& dims, int history_steps,
                       int future_steps, uint64_t seed);

// Registers every parameter tensor of `params` as a leaf on `tape` and
// returns the tracked view; `leaf_nodes` lists (name, node id) in visit order.
ModelParams track_params(Tape& tape, const ModelParams& params,
                         std::vector<std::pair<std::string, int>>* leaf_nodes = nullptr);

struct PredictionSet {
  std::vector<int> target_indices;   // indices into the sample's agents
  std::vector<Tensor> trajectories;  // per target, [T_f, 2] in the target's frame

  int target_count() const { return static_cast<int>(target_indices.size()); }
  // Plain-value local trajectories.
  std::vector<std::vector<std::array<double, 2>>> local_values() const;
  // Mapped back to the global frame via the targets' stored current states.
  std::vector<std::vector<std::array<double, 2>>> global_values(const SceneSample&) const;
};

// Per-pass observability for tests (channel features, encode_map call count).
struct ForwardTrace {
  int encode_map_calls = 0;
  std::vector<Tensor> dynamics;     // per agent, [1, F_r] (empty when unused)
  Tensor interaction;               // [n, F'_h] (undefined when unused)
  Tensor map_feature;               // [1, F_map]
  std::vector<Tensor> gated_map;    // per target
};

// One forward pass of the selected variant over a scene: type-routed GRU
// dynamics, HEAT-stack interaction features over the graph, gated map
// features, and per-target type-routed LSTM decoding of the concatenation.
PredictionSet forward(const SceneSample& sample, const InteractionGraph& graph,
                      const ModelParams& params, const MapRaster* raster,
                      ForwardTrace* trace = nullptr);

// Mean squared error over all targets, steps, and both coordinates.
Tensor mse_loss(const PredictionSet& pred, const SceneSample& sample);

}  // namespace heatnet
