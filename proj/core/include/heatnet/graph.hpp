#pragma once

#include <array>
#include <ostream>
#include <utility>
#include <vector>

#include "heatnet/scene.hpp"

namespace heatnet {

constexpr int kEdgeAttrWidth = 6;  // rel pos (2), rel vel (2), cos/sin of yaw delta
constexpr int kEdgeTypeCount = kNumAgentTypes * kNumAgentTypes;

// Directed edge-featured heterogeneous interaction graph. Edges are grouped
// by destination node (ascending source within each group), so in_edges[i]
// indexes a contiguous run. Every node carries a self-loop.
struct InteractionGraph {
  int node_count = 0;
  std::vector<AgentType> node_types;
  std::vector<std::pair<int, int>> edges;  // (src j, dst i)
  std::vector<std::array<double, kEdgeAttrWidth>> edge_attrs;
  std::vector<int> edge_type_ids;  // kappa_src * kNumAgentTypes + kappa_dst
  std::vector<std::vector<int>> in_edges;

  int edge_count() const { return static_cast<int>(edges.size()); }
  // Node type ids as plain ints (projection routing).
  std::vector<int> node_type_ids() const;
};

int edge_type_id(AgentType src, AgentType dst);

// Relative state of src expressed in dst's exclusive frame.
std::array<double, kEdgeAttrWidth> edge_attr(const AgentState& src, const AgentState& dst);

InteractionGraph build_graph(const SceneSample& sample, double radius);

// Debug export for fixture diffing: one row per edge.
void write_graph_csv(std::ostream& out, const std::string& scene_id,
                     const InteractionGraph& graph, bool header = true);

}  // namespace heatnet
