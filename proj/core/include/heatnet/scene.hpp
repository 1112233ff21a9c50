#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "heatnet/tensor.hpp"

namespace heatnet {

enum class AgentType : int { kVehicle = 0, kPedestrianBicycle = 1 };
constexpr int kNumAgentTypes = 2;
constexpr int kHistoryInputWidth = 6;  // (x, y, vx, vy, cos yaw, sin yaw) per step
constexpr int kMapAttrWidth = 6;

const char* agent_type_token(AgentType type);        // CSV token: "vehicle" | "vru"
AgentType agent_type_from_token(const std::string&);  // throws ParseError

struct AgentState {
  double x = 0, y = 0;    // meters
  double vx = 0, vy = 0;  // meters/second
  double yaw = 0;         // radians, wrapped to (-pi, pi]
};

double wrap_angle(double a);
// Frame +x direction for an agent: velocity heading, or the recorded yaw when
// the agent is essentially stationary (|v| < 1e-6 m/s).
double frame_orientation(const AgentState& s);

// Rigid planar transform (rotation then translation), used by invariance tests
// and by the local->global mapping of predictions.
struct Se2 {
  double theta = 0, tx = 0, ty = 0;
  AgentState apply(const AgentState& s) const;
  std::array<double, 2> apply_point(double x, double y) const;
};

struct AgentTrack {
  int id = 0;
  AgentType type = AgentType::kVehicle;
  double tick = 0.1;    // seconds per step
  int first_tick = 0;   // tick index of states.front()
  std::vector<AgentState> states;

  int last_tick() const { return first_tick + static_cast<int>(states.size()) - 1; }
  bool covers(int t) const { return t >= first_tick && t <= last_tick(); }
  const AgentState& at_tick(int t) const { return states[static_cast<size_t>(t - first_tick)]; }
};

// Placement of the scene raster in world coordinates.
struct MapFrame {
  double meters_per_pixel = 1.0;
  double cx = 0.0, cy = 0.0;
  int size_px = 64;
  double half_extent() const { return 0.5 * meters_per_pixel * size_px; }
};

struct SceneSample {
  std::string scene_id;
  int decision_tick = 0;
  double tick = 0.1;
  int history_steps = 0;  // T_h
  int future_steps = 0;   // T_f

  std::vector<int> agent_ids;
  std::vector<AgentType> agent_types;
  // Per agent: T_h states in that agent's exclusive frame (last position (0,0)).
  std::vector<std::vector<AgentState>> histories;
  // Per agent: current state in the global frame (the frame anchor).
  std::vector<AgentState> current;
  // Per agent: T_f future positions in the agent's exclusive frame; empty
  // unless the target mask is set.
  std::vector<std::vector<std::array<double, 2>>> futures;
  std::vector<bool> target_mask;
  std::vector<bool> vehicle_mask;
  std::vector<bool> pedestrian_mask;
  MapFrame map_frame;
  std::vector<std::array<double, kMapAttrWidth>> map_attrs;

  int agent_count() const { return static_cast<int>(agent_ids.size()); }
  std::vector<int> target_indices() const;
  // History encoded as a [T_h, 6] model input matrix.
  Tensor history_matrix(int agent_index) const;
};

struct LocalHistory {
  std::vector<AgentState> states;  // length T_h, exclusive frame
  AgentState current;              // global anchor state
};

// Re-expresses the last `history_steps` states of a track (ending at tick t)
// in the agent's exclusive frame. Throws TruncationError when the track does
// not cover the window.
LocalHistory to_exclusive_frame(const AgentTrack& track, int t, int history_steps);

// Applies the inverse exclusive-frame transform of `anchor` to a local point.
std::array<double, 2> local_to_global(const AgentState& anchor, double lx, double ly);
// Future positions of a track segment expressed in the anchor's frame.
std::vector<std::array<double, 2>> future_in_frame(const AgentTrack& track, int t,
                                                   int future_steps);

// (x-cx, y-cy, vx, vy, cos yaw, sin yaw); positions normalized by half-extent.
std::array<double, kMapAttrWidth> vehicle_to_map_attr(const AgentState& s, const MapFrame& frame);
// Undoes the positional normalization (used by round-trip checks).
std::array<double, 2> map_attr_position(const std::array<double, kMapAttrWidth>& attr,
                                        const MapFrame& frame);

struct SceneSchema {
  double tick = 0.1;
  int history_steps = 10;
  int future_steps = 30;
  // Optional map placement per scene id; identity frame when absent.
  std::function<MapFrame(const std::string& scene_id)> map_frame_lookup;
};

std::vector<SceneSample> load_scenes(const std::string& csv_path, const SceneSchema& schema);

// Builds one sample from in-memory tracks at decision tick t (same rules as
// load_scenes). Returns false when no agent qualifies even as a neighbor.
bool assemble_sample(const std::string& scene_id, const std::vector<AgentTrack>& tracks,
                     int t, const SceneSchema& schema, const MapFrame& frame,
                     SceneSample* out);

enum class MotionPattern {
  kConstantVelocity,
  kCircularArc,
  kLaneChange,
  kMixed,     // cycles the three base patterns across scenes
  kYielding,  // arc agent brakes iff a crossing agent conflicts
};
const char* motion_pattern_token(MotionPattern);
MotionPattern motion_pattern_from_token(const std::string&);

struct ScenarioConfig {
  double tick = 0.1;
  int history_steps = 10;   // T_h >= 2
  int future_steps = 30;    // T_f >= 1
  double radius = 30.0;     // neighborhood radius, m
  int vehicles = 2;
  int pedestrians = 1;
  int scenes = 10;
  MotionPattern pattern = MotionPattern::kMixed;
  int map_size_px = 64;
  double meters_per_pixel = 2.0;

  void validate() const;  // throws ConfigError
};

// A generated scene with its global ground truth, for CSV/PGM export.
struct SyntheticScene {
  std::string id;
  std::vector<AgentTrack> tracks;
  MapFrame frame;
  SceneSample sample;
  // Global polylines (one per agent, full track span) for road-mask rendering.
  std::vector<std::vector<std::array<double, 2>>> paths() const;
};

std::vector<SyntheticScene> generate_synthetic_scenes(const ScenarioConfig& config,
                                                      uint64_t seed);
std::vector<SceneSample> generate_synthetic(const ScenarioConfig& config, uint64_t seed);

void write_scene_csv(const std::string& path, const std::vector<SyntheticScene>& scenes);

}  // namespace heatnet
