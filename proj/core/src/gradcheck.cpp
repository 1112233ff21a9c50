#include "heatnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "heatnet/dataset.hpp"

namespace heatnet {

double GradCheckReport::worst() const {
  double w = 0.0;
  for (const auto& g : groups) w = std::max(w, g.worst_rel_err);
  return w;
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
  return std::fabs(analytic - numeric) / denom;
}

GradCheckReport gradcheck_model(uint64_t seed, double step, const GradTamper& tamper) {
  // 4-agent micro-instance on a 16x16 raster; everything is connected.
  ScenarioConfig scenario;
  scenario.tick = 0.1;
  scenario.history_steps = 5;
  scenario.future_steps = 3;
  scenario.radius = 200.0;
  scenario.vehicles = 2;
  scenario.pedestrians = 2;
  scenario.scenes = 1;
  scenario.pattern = MotionPattern::kCircularArc;
  scenario.map_size_px = 16;
  scenario.meters_per_pixel = 6.0;
  const auto scenes = generate_synthetic_scenes(scenario, seed);
  const Dataset data = dataset_from_scenes(scenes);
  const SceneSample& sample = data.samples.front();
  const MapRaster* raster = data.raster_for(sample);
  const InteractionGraph graph = build_graph(sample, scenario.radius);

  ModelDims dims;
  dims.dyn_hidden = 8;
  dims.node_proj = 6;
  dims.edge_attr_proj = 3;
  dims.edge_type_proj = 3;
  dims.heads = 2;
  dims.interaction_out = 8;
  dims.heat_layers = 1;
  dims.map_size = 16;
  dims.map_feature = 6;
  dims.cnn_channels = {2, 2, 2};
  dims.dec_hidden = 8;
  ModelParams params = init_model(Variant::kHeatIR, dims, scenario.history_steps,
                                  scenario.future_steps, seed + 1);

  // Analytic gradients from one taped pass.
  Tape tape;
  std::vector<std::pair<std::string, int>> leaves;
  const ModelParams tracked = track_params(tape, params, &leaves);
  const GradMap grad_map = tape.backward(mse_loss(forward(sample, graph, tracked, raster),
                                                  sample));
  std::vector<std::vector<double>> analytic;
  analytic.reserve(leaves.size());
  for (const auto& [name, node] : leaves) {
    std::vector<double> g = grad_map.at_node(node).values();
    if (tamper) tamper(name, g);
    analytic.push_back(std::move(g));
  }

  auto eval_loss = [&]() {
    return mse_loss(forward(sample, graph, params, raster), sample).value();
  };

  std::vector<std::pair<std::string, Tensor*>> slots;
  params.visit([&](const std::string& name, Tensor& t) { slots.emplace_back(name, &t); });

  GradCheckReport report;
  report.groups.reserve(slots.size());
  for (size_t s = 0; s < slots.size(); ++s) {
    auto [name, tensor] = slots[s];
    const Tensor original = *tensor;
    double worst = 0.0;
    for (int64_t i = 0; i < original.size(); ++i) {
      std::vector<double> plus(original.values());
      plus[static_cast<size_t>(i)] += step;
      *tensor = Tensor(original.shape(), std::move(plus));
      const double up = eval_loss();
      std::vector<double> minus(original.values());
      minus[static_cast<size_t>(i)] -= step;
      *tensor = Tensor(original.shape(), std::move(minus));
      const double down = eval_loss();
      const double numeric = (up - down) / (2.0 * step);
      worst = std::max(worst, relative_error(analytic[s][static_cast<size_t>(i)], numeric));
    }
    *tensor = original;
    report.groups.push_back({name, worst});
  }
  return report;
}

}  // namespace heatnet
