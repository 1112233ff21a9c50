#include "heatnet/graph.hpp"

#include <cmath>
#include <cstdio>

namespace heatnet {

int edge_type_id(AgentType src, AgentType dst) {
  return static_cast<int>(src) * kNumAgentTypes + static_cast<int>(dst);
}

std::vector<int> InteractionGraph::node_type_ids() const {
  std::vector<int> out(node_types.size());
  for (size_t i = 0; i < node_types.size(); ++i) out[i] = static_cast<int>(node_types[i]);
  return out;
}

std::array<double, kEdgeAttrWidth> edge_attr(const AgentState& src, const AgentState& dst) {
  const double theta = frame_orientation(dst);
  const double c = std::cos(theta), sn = std::sin(theta);
  const double dx = src.x - dst.x, dy = src.y - dst.y;
  const double dvx = src.vx - dst.vx, dvy = src.vy - dst.vy;
  const double dyaw = wrap_angle(src.yaw - dst.yaw);
  return {c * dx + sn * dy,   -sn * dx + c * dy,
          c * dvx + sn * dvy, -sn * dvx + c * dvy,
          std::cos(dyaw),     std::sin(dyaw)};
}

InteractionGraph build_graph(const SceneSample& sample, double radius) {
  const int n = sample.agent_count();
  if (n < 1) throw ConfigError("build_graph: sample has no agents");
  InteractionGraph g;
  g.node_count = n;
  g.node_types = sample.agent_types;
  g.in_edges.assign(static_cast<size_t>(n), {});
  for (int i = 0; i < n; ++i) {  // destination
    for (int j = 0; j < n; ++j) {  // source
      const AgentState& si = sample.current[static_cast<size_t>(i)];
      const AgentState& sj = sample.current[static_cast<size_t>(j)];
      bool connected = j == i;
      if (!connected) {
        const double dist = std::hypot(sj.x - si.x, sj.y - si.y);
        connected = dist <= radius;
      }
      if (!connected) continue;
      g.in_edges[static_cast<size_t>(i)].push_back(g.edge_count());
      g.edges.emplace_back(j, i);
      // Self-relative attributes are exactly (0,0,0,0,1,0).
      g.edge_attrs.push_back(j == i ? std::array<double, kEdgeAttrWidth>{0, 0, 0, 0, 1, 0}
                                    : edge_attr(sj, si));
      g.edge_type_ids.push_back(
          edge_type_id(sample.agent_types[static_cast<size_t>(j)],
                       sample.agent_types[static_cast<size_t>(i)]));
    }
  }
  return g;
}

void write_graph_csv(std::ostream& out, const std::string& scene_id,
                     const InteractionGraph& graph, bool header) {
  if (header) {
    out << "scene_id,src,dst,edge_type";
    for (int k = 0; k < kEdgeAttrWidth; ++k) out << ",attr" << k;
    out << "\n";
  }
  char buf[64];
  for (int e = 0; e < graph.edge_count(); ++e) {
    out << scene_id << ',' << graph.edges[static_cast<size_t>(e)].first << ','
        << graph.edges[static_cast<size_t>(e)].second << ','
        << graph.edge_type_ids[static_cast<size_t>(e)];
    for (int k = 0; k < kEdgeAttrWidth; ++k) {
      std::snprintf(buf, sizeof(buf), ",%.17g", graph.edge_attrs[static_cast<size_t>(e)][static_cast<size_t>(k)]);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace heatnet
