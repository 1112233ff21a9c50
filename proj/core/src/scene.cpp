#include "heatnet/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace heatnet {

const char* agent_type_token(AgentType type) {
  return type == AgentType::kVehicle ? "vehicle" : "vru";
}

AgentType agent_type_from_token(const std::string& token) {
  if (token == "vehicle") return AgentType::kVehicle;
  if (token == "vru") return AgentType::kPedestrianBicycle;
  throw ParseError("unknown agent type '" + token + "'");
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  else if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

double frame_orientation(const AgentState& s) {
  const double speed = std::hypot(s.vx, s.vy);
  return speed >= 1e-6 ? std::atan2(s.vy, s.vx) : s.yaw;
}

AgentState Se2::apply(const AgentState& s) const {
  const double c = std::cos(theta), sn = std::sin(theta);
  AgentState out;
  out.x = c * s.x - sn * s.y + tx;
  out.y = sn * s.x + c * s.y + ty;
  out.vx = c * s.vx - sn * s.vy;
  out.vy = sn * s.vx + c * s.vy;
  out.yaw = wrap_angle(s.yaw + theta);
  return out;
}

std::array<double, 2> Se2::apply_point(double x, double y) const {
  const double c = std::cos(theta), sn = std::sin(theta);
  return {c * x - sn * y + tx, sn * x + c * y + ty};
}

namespace {

// Re-expresses a state in the frame anchored at `anchor` with +x at `theta`.
AgentState to_frame(const AgentState& s, const AgentState& anchor, double theta) {
  const double c = std::cos(theta), sn = std::sin(theta);
  const double dx = s.x - anchor.x, dy = s.y - anchor.y;
  AgentState out;
  out.x = c * dx + sn * dy;
  out.y = -sn * dx + c * dy;
  out.vx = c * s.vx + sn * s.vy;
  out.vy = -sn * s.vx + c * s.vy;
  out.yaw = wrap_angle(s.yaw - theta);
  return out;
}

std::vector<AgentState> states_to_frame(const std::vector<AgentState>& states,
                                        const AgentState& anchor) {
  const double theta = frame_orientation(anchor);
  std::vector<AgentState> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(to_frame(s, anchor, theta));
  return out;
}

}  // namespace

LocalHistory to_exclusive_frame(const AgentTrack& track, int t, int history_steps) {
  const int start = t - history_steps + 1;
  if (history_steps < 1 || !track.covers(t) || !track.covers(start)) {
    throw TruncationError("agent " + std::to_string(track.id) + ": track [" +
                          std::to_string(track.first_tick) + "," +
                          std::to_string(track.last_tick()) + "] cannot supply " +
                          std::to_string(history_steps) + " steps ending at tick " +
                          std::to_string(t));
  }
  std::vector<AgentState> window(track.states.begin() + (start - track.first_tick),
                                 track.states.begin() + (t - track.first_tick) + 1);
  LocalHistory out;
  out.current = track.at_tick(t);
  out.states = states_to_frame(window, out.current);
  return out;
}

std::array<double, 2> local_to_global(const AgentState& anchor, double lx, double ly) {
  const double theta = frame_orientation(anchor);
  const double c = std::cos(theta), sn = std::sin(theta);
  return {anchor.x + c * lx - sn * ly, anchor.y + sn * lx + c * ly};
}

std::vector<std::array<double, 2>> future_in_frame(const AgentTrack& track, int t,
                                                   int future_steps) {
  if (!track.covers(t) || !track.covers(t + future_steps)) {
    throw TruncationError("agent " + std::to_string(track.id) + ": no " +
                          std::to_string(future_steps) + "-step future at tick " +
                          std::to_string(t));
  }
  const AgentState& anchor = track.at_tick(t);
  const double theta = frame_orientation(anchor);
  std::vector<std::array<double, 2>> out;
  out.reserve(static_cast<size_t>(future_steps));
  for (int k = 1; k <= future_steps; ++k) {
    const AgentState local = to_frame(track.at_tick(t + k), anchor, theta);
    out.push_back({local.x, local.y});
  }
  return out;
}

std::array<double, kMapAttrWidth> vehicle_to_map_attr(const AgentState& s,
                                                      const MapFrame& frame) {
  const double he = frame.half_extent();
  return {(s.x - frame.cx) / he, (s.y - frame.cy) / he, s.vx, s.vy,
          std::cos(s.yaw), std::sin(s.yaw)};
}

std::array<double, 2> map_attr_position(const std::array<double, kMapAttrWidth>& attr,
                                        const MapFrame& frame) {
  const double he = frame.half_extent();
  return {attr[0] * he + frame.cx, attr[1] * he + frame.cy};
}

std::vector<int> SceneSample::target_indices() const {
  std::vector<int> out;
  for (int i = 0; i < agent_count(); ++i)
    if (target_mask[static_cast<size_t>(i)]) out.push_back(i);
  return out;
}

Tensor SceneSample::history_matrix(int agent_index) const {
  const auto& hist = histories[static_cast<size_t>(agent_index)];
  std::vector<double> v;
  v.reserve(hist.size() * kHistoryInputWidth);
  for (const auto& s : hist) {
    v.push_back(s.x);
    v.push_back(s.y);
    v.push_back(s.vx);
    v.push_back(s.vy);
    v.push_back(std::cos(s.yaw));
    v.push_back(std::sin(s.yaw));
  }
  return Tensor({static_cast<int>(hist.size()), kHistoryInputWidth}, std::move(v));
}

bool assemble_sample(const std::string& scene_id, const std::vector<AgentTrack>& tracks,
                     int t, const SceneSchema& schema, const MapFrame& frame,
                     SceneSample* out) {
  SceneSample sample;
  sample.scene_id = scene_id;
  sample.decision_tick = t;
  sample.tick = schema.tick;
  sample.history_steps = schema.history_steps;
  sample.future_steps = schema.future_steps;
  sample.map_frame = frame;

  bool any_target = false;
  for (const auto& track : tracks) {
    if (!track.covers(t)) continue;
    const int avail = t - track.first_tick + 1;
    if (avail < 2) continue;  // too briefly observed even for a neighbor

    std::vector<AgentState> window;
    if (avail >= schema.history_steps) {
      window.assign(track.states.begin() + (t - schema.history_steps + 1 - track.first_tick),
                    track.states.begin() + (t - track.first_tick) + 1);
    } else {
      // Front-pad short neighbor histories by repeating the earliest state.
      window.assign(static_cast<size_t>(schema.history_steps - avail), track.states.front());
      window.insert(window.end(), track.states.begin(),
                    track.states.begin() + (t - track.first_tick) + 1);
    }
    const AgentState current = track.at_tick(t);
    sample.agent_ids.push_back(track.id);
    sample.agent_types.push_back(track.type);
    sample.histories.push_back(states_to_frame(window, current));
    sample.current.push_back(current);
    sample.vehicle_mask.push_back(track.type == AgentType::kVehicle);
    sample.pedestrian_mask.push_back(track.type == AgentType::kPedestrianBicycle);
    sample.map_attrs.push_back(vehicle_to_map_attr(current, frame));

    const bool is_target = avail >= schema.history_steps &&
                           track.covers(t + schema.future_steps);
    sample.target_mask.push_back(is_target);
    if (is_target) {
      sample.futures.push_back(future_in_frame(track, t, schema.future_steps));
      any_target = true;
    } else {
      sample.futures.emplace_back();
    }
  }
  if (sample.agent_ids.empty()) return false;
  *out = std::move(sample);
  return any_target;
}

// ---------------------------------------------------------------------------
// CSV loading
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

double parse_double(const std::string& s, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  if (!std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line_no) + ": non-finite value '" + s + "'");
  }
  return v;
}

long parse_int(const std::string& s, int line_no) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

const char* kSceneCsvHeader = "scene_id,tick_index,agent_id,agent_type,x,y,vx,vy,yaw";

}  // namespace

std::vector<SceneSample> load_scenes(const std::string& csv_path, const SceneSchema& schema) {
  if (schema.history_steps < 2 || schema.future_steps < 1) {
    throw ConfigError("scene schema: need history_steps >= 2 and future_steps >= 1");
  }
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open scene file '" + csv_path + "'");

  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) return {};  // empty file
  ++line_no;
  {
    auto header = split_csv_line(line);
    auto expect = split_csv_line(kSceneCsvHeader);
    if (header != expect) {
      throw ParseError("line 1: expected header '" + std::string(kSceneCsvHeader) + "'");
    }
  }

  struct Observation {
    AgentState state;
    AgentType type;
  };
  struct SceneRows {
    std::map<int, std::map<int, Observation>> by_agent;  // agent id -> tick -> obs
  };
  std::vector<std::string> scene_order;
  std::map<std::string, SceneRows> scenes;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 9) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 9 fields, got " +
                       std::to_string(f.size()));
    }
    const std::string& scene_id = f[0];
    const int tick_index = static_cast<int>(parse_int(f[1], line_no));
    const int agent_id = static_cast<int>(parse_int(f[2], line_no));
    AgentType type;
    try {
      type = agent_type_from_token(f[3]);
    } catch (const ParseError&) {
      throw ParseError("line " + std::to_string(line_no) + ": unknown agent type '" + f[3] + "'");
    }
    AgentState s;
    s.x = parse_double(f[4], line_no);
    s.y = parse_double(f[5], line_no);
    s.vx = parse_double(f[6], line_no);
    s.vy = parse_double(f[7], line_no);
    s.yaw = wrap_angle(parse_double(f[8], line_no));

    if (scenes.find(scene_id) == scenes.end()) scene_order.push_back(scene_id);
    auto& agent_rows = scenes[scene_id].by_agent[agent_id];
    if (!agent_rows.emplace(tick_index, Observation{s, type}).second) {
      throw SchemaError("line " + std::to_string(line_no) + ": duplicate row for scene '" +
                        scene_id + "', agent " + std::to_string(agent_id) + ", tick " +
                        std::to_string(tick_index));
    }
    if (agent_rows.begin()->second.type != type) {
      throw SchemaError("line " + std::to_string(line_no) + ": agent " +
                        std::to_string(agent_id) + " changes type mid-track");
    }
  }

  std::vector<SceneSample> samples;
  for (const auto& scene_id : scene_order) {
    const auto& rows = scenes[scene_id];
    std::vector<AgentTrack> tracks;
    int min_tick = 0, max_tick = -1;
    for (const auto& [agent_id, obs] : rows.by_agent) {
      AgentTrack track;
      track.id = agent_id;
      track.type = obs.begin()->second.type;
      track.tick = schema.tick;
      track.first_tick = obs.begin()->first;
      int expect = track.first_tick;
      for (const auto& [tick_index, o] : obs) {
        if (tick_index != expect) {
          throw SchemaError("scene '" + scene_id + "', agent " + std::to_string(agent_id) +
                            ": tick sequence has a gap at " + std::to_string(expect));
        }
        track.states.push_back(o.state);
        ++expect;
      }
      if (tracks.empty() || track.first_tick < min_tick) min_tick = track.first_tick;
      if (tracks.empty() || track.last_tick() > max_tick) max_tick = track.last_tick();
      tracks.push_back(std::move(track));
    }
    MapFrame frame;
    if (schema.map_frame_lookup) frame = schema.map_frame_lookup(scene_id);
    for (int t = min_tick; t <= max_tick; ++t) {
      SceneSample sample;
      if (assemble_sample(scene_id, tracks, t, schema, frame, &sample)) {
        samples.push_back(std::move(sample));
      }
    }
  }
  return samples;
}

// ---------------------------------------------------------------------------
// Synthetic generation
// ---------------------------------------------------------------------------

void ScenarioConfig::validate() const {
  if (history_steps < 2) throw ConfigError("scenario: history_steps must be >= 2");
  if (future_steps < 1) throw ConfigError("scenario: future_steps must be >= 1");
  if (radius <= 0) throw ConfigError("scenario: radius must be positive");
  if (tick <= 0) throw ConfigError("scenario: tick must be positive");
  if (scenes < 0 || vehicles < 0 || pedestrians < 0) {
    throw ConfigError("scenario: counts must be non-negative");
  }
  if (map_size_px < 4) throw ConfigError("scenario: map_size_px must be >= 4");
  if (meters_per_pixel <= 0) throw ConfigError("scenario: meters_per_pixel must be positive");
}

const char* motion_pattern_token(MotionPattern p) {
  switch (p) {
    case MotionPattern::kConstantVelocity: return "constant_velocity";
    case MotionPattern::kCircularArc: return "circular_arc";
    case MotionPattern::kLaneChange: return "lane_change";
    case MotionPattern::kMixed: return "mixed";
    case MotionPattern::kYielding: return "yielding";
  }
  return "?";
}

MotionPattern motion_pattern_from_token(const std::string& s) {
  if (s == "constant_velocity") return MotionPattern::kConstantVelocity;
  if (s == "circular_arc") return MotionPattern::kCircularArc;
  if (s == "lane_change") return MotionPattern::kLaneChange;
  if (s == "mixed") return MotionPattern::kMixed;
  if (s == "yielding") return MotionPattern::kYielding;
  throw ConfigError("unknown motion pattern '" + s + "'");
}

std::vector<std::vector<std::array<double, 2>>> SyntheticScene::paths() const {
  std::vector<std::vector<std::array<double, 2>>> out;
  for (const auto& track : tracks) {
    std::vector<std::array<double, 2>> p;
    p.reserve(track.states.size());
    for (const auto& s : track.states) p.push_back({s.x, s.y});
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

AgentState state_at(double x, double y, double vx, double vy) {
  AgentState s;
  s.x = x;
  s.y = y;
  s.vx = vx;
  s.vy = vy;
  s.yaw = wrap_angle(std::atan2(vy, vx));
  return s;
}

AgentTrack constant_velocity_track(int id, AgentType type, const ScenarioConfig& cfg,
                                   Rng& rng) {
  const bool vehicle = type == AgentType::kVehicle;
  const double speed = vehicle ? uniform(rng, 5.0, 10.0) : uniform(rng, 0.8, 2.5);
  const double heading = uniform(rng, -M_PI, M_PI);
  const double x0 = uniform(rng, -20.0, 20.0), y0 = uniform(rng, -20.0, 20.0);
  const double vx = speed * std::cos(heading), vy = speed * std::sin(heading);
  AgentTrack track{id, type, cfg.tick, 0, {}};
  const int steps = cfg.history_steps + cfg.future_steps;
  for (int k = 0; k < steps; ++k) {
    const double t = k * cfg.tick;
    track.states.push_back(state_at(x0 + vx * t, y0 + vy * t, vx, vy));
  }
  return track;
}

AgentTrack circular_arc_track(int id, AgentType type, const ScenarioConfig& cfg, Rng& rng) {
  const bool vehicle = type == AgentType::kVehicle;
  const double radius = vehicle ? uniform(rng, 15.0, 30.0) : uniform(rng, 4.0, 8.0);
  const double speed = vehicle ? uniform(rng, 5.0, 10.0) : uniform(rng, 0.8, 2.5);
  const double cx = uniform(rng, -12.0, 12.0), cy = uniform(rng, -12.0, 12.0);
  const double phi0 = uniform(rng, -M_PI, M_PI);
  const double dir = rng() % 2 == 0 ? 1.0 : -1.0;
  const double omega = speed / radius;
  AgentTrack track{id, type, cfg.tick, 0, {}};
  const int steps = cfg.history_steps + cfg.future_steps;
  for (int k = 0; k < steps; ++k) {
    const double phi = phi0 + dir * omega * k * cfg.tick;
    const double vx = -radius * omega * dir * std::sin(phi);
    const double vy = radius * omega * dir * std::cos(phi);
    track.states.push_back(state_at(cx + radius * std::cos(phi), cy + radius * std::sin(phi),
                                    vx, vy));
  }
  return track;
}

AgentTrack lane_change_track(int id, AgentType type, const ScenarioConfig& cfg, Rng& rng) {
  const bool vehicle = type == AgentType::kVehicle;
  const double speed = vehicle ? uniform(rng, 6.0, 10.0) : uniform(rng, 1.0, 2.5);
  const double heading = uniform(rng, -M_PI, M_PI);
  const double x0 = uniform(rng, -15.0, 15.0), y0 = uniform(rng, -15.0, 15.0);
  const double lateral = (rng() % 2 == 0 ? 1.0 : -1.0) * uniform(rng, 2.5, 3.5);
  const double rate = uniform(rng, 1.5, 3.0);  // sigmoid sharpness, 1/s
  const int steps = cfg.history_steps + cfg.future_steps;
  const double t_mid = 0.5 * (steps - 1) * cfg.tick;
  const double ax = std::cos(heading), ay = std::sin(heading);   // along-lane
  const double nx = -std::sin(heading), ny = std::cos(heading);  // lateral
  AgentTrack track{id, type, cfg.tick, 0, {}};
  for (int k = 0; k < steps; ++k) {
    const double t = k * cfg.tick;
    const double s = 1.0 / (1.0 + std::exp(-rate * (t - t_mid)));
    const double offset = lateral * s;
    const double doffset = lateral * rate * s * (1.0 - s);  // analytic derivative
    const double px = x0 + ax * speed * t + nx * offset;
    const double py = y0 + ay * speed * t + ny * offset;
    const double vx = ax * speed + nx * doffset;
    const double vy = ay * speed + ny * doffset;
    track.states.push_back(state_at(px, py, vx, vy));
  }
  return track;
}

// Arc vehicle approaching a conflict point; a crossing agent either conflicts
// (target brakes along the arc) or has already cleared (target keeps speed).
// The crosser's exclusive-frame history is identical in both cases; only its
// global placement differs, so the discriminating signal lives in the edge
// attributes.
std::vector<AgentTrack> yielding_tracks(int scene_index, const ScenarioConfig& cfg, Rng& rng) {
  const double radius = uniform(rng, 18.0, 30.0);
  const double speed = uniform(rng, 6.0, 12.0);
  const double omega0 = speed / radius;
  const double cx = uniform(rng, -8.0, 8.0), cy = uniform(rng, -8.0, 8.0);
  const double dir = rng() % 2 == 0 ? 1.0 : -1.0;
  const double phi_conflict = uniform(rng, -M_PI, M_PI);
  const double arrive_after = uniform(rng, 1.0, 2.0);  // seconds from decision to conflict
  const bool conflict = rng() % 2 == 0;

  const int t0 = cfg.history_steps - 1;
  const int steps = cfg.history_steps + cfg.future_steps;
  const double t0s = t0 * cfg.tick;

  // Target angular position: constant omega0 until the decision time, then a
  // constant angular deceleration toward omega_min when yielding.
  const double omega_min = 0.15 * omega0;
  const double brake_time = uniform(rng, 1.2, 2.0);
  const double alpha = (omega0 - omega_min) / brake_time;
  const double phi_t0 = phi_conflict - dir * omega0 * arrive_after;

  auto target_phase = [&](double t) {
    const double tau = t - t0s;
    if (tau <= 0.0 || !conflict) return phi_t0 + dir * omega0 * tau;
    const double tb = std::min(tau, brake_time);
    double phase = omega0 * tb - 0.5 * alpha * tb * tb;
    if (tau > brake_time) phase += omega_min * (tau - brake_time);
    return phi_t0 + dir * phase;
  };
  auto target_omega = [&](double t) {
    const double tau = t - t0s;
    if (tau <= 0.0 || !conflict) return omega0;
    return std::max(omega_min, omega0 - alpha * tau);
  };

  AgentTrack target{0, AgentType::kVehicle, cfg.tick, 0, {}};
  for (int k = 0; k < steps; ++k) {
    const double t = k * cfg.tick;
    const double phi = target_phase(t);
    const double w = target_omega(t);
    const double vx = -radius * w * dir * std::sin(phi);
    const double vy = radius * w * dir * std::cos(phi);
    target.states.push_back(state_at(cx + radius * std::cos(phi), cy + radius * std::sin(phi),
                                     vx, vy));
  }

  // Crossing agent: straight line through the conflict point. Conflict case
  // reaches it shortly after the target would; clear case crossed long ago.
  const double qx = cx + radius * std::cos(phi_conflict);
  const double qy = cy + radius * std::sin(phi_conflict);
  const double tangent = phi_conflict + dir * M_PI / 2.0;  // target heading at q
  const double cross_angle = tangent + (rng() % 2 == 0 ? 1.0 : -1.0) *
                                           uniform(rng, M_PI / 3.0, 2.0 * M_PI / 3.0);
  const AgentType crosser_type =
      scene_index % 2 == 0 ? AgentType::kVehicle : AgentType::kPedestrianBicycle;
  const double crosser_speed = crosser_type == AgentType::kVehicle ? uniform(rng, 3.0, 6.0)
                                                                   : uniform(rng, 1.2, 2.5);
  const double t_cross = conflict ? t0s + arrive_after + uniform(rng, -0.4, 0.4)
                                  : t0s - uniform(rng, 1.5, 3.0);
  const double dx = std::cos(cross_angle), dy = std::sin(cross_angle);
  // History plus the current tick only: the crosser stays a neighbor, never a target.
  AgentTrack crosser{1, crosser_type, cfg.tick, 0, {}};
  for (int k = 0; k <= t0; ++k) {
    const double t = k * cfg.tick;
    crosser.states.push_back(state_at(qx + dx * crosser_speed * (t - t_cross),
                                      qy + dy * crosser_speed * (t - t_cross),
                                      dx * crosser_speed, dy * crosser_speed));
  }
  return {std::move(target), std::move(crosser)};
}

MotionPattern base_pattern(const ScenarioConfig& cfg, int scene_index) {
  if (cfg.pattern != MotionPattern::kMixed) return cfg.pattern;
  switch (scene_index % 3) {
    case 0: return MotionPattern::kConstantVelocity;
    case 1: return MotionPattern::kCircularArc;
    default: return MotionPattern::kLaneChange;
  }
}

std::string scene_name(MotionPattern p, int index) {
  const char* prefix = "s";
  switch (p) {
    case MotionPattern::kConstantVelocity: prefix = "cv"; break;
    case MotionPattern::kCircularArc: prefix = "arc"; break;
    case MotionPattern::kLaneChange: prefix = "lane"; break;
    case MotionPattern::kYielding: prefix = "yield"; break;
    case MotionPattern::kMixed: prefix = "mix"; break;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04d", prefix, index);
  return buf;
}

}  // namespace

std::vector<SyntheticScene> generate_synthetic_scenes(const ScenarioConfig& config,
                                                      uint64_t seed) {
  config.validate();
  Rng rng(seed);
  SceneSchema schema;
  schema.tick = config.tick;
  schema.history_steps = config.history_steps;
  schema.future_steps = config.future_steps;

  std::vector<SyntheticScene> out;
  out.reserve(static_cast<size_t>(config.scenes));
  for (int s = 0; s < config.scenes; ++s) {
    SyntheticScene scene;
    const MotionPattern pattern = base_pattern(config, s);
    scene.id = scene_name(pattern, s);
    scene.frame = MapFrame{config.meters_per_pixel, 0.0, 0.0, config.map_size_px};

    if (pattern == MotionPattern::kYielding) {
      scene.tracks = yielding_tracks(s, config, rng);
    } else {
      int id = 0;
      for (int v = 0; v < config.vehicles; ++v) {
        switch (pattern) {
          case MotionPattern::kConstantVelocity:
            scene.tracks.push_back(constant_velocity_track(id, AgentType::kVehicle, config, rng));
            break;
          case MotionPattern::kCircularArc:
            scene.tracks.push_back(circular_arc_track(id, AgentType::kVehicle, config, rng));
            break;
          default:
            scene.tracks.push_back(lane_change_track(id, AgentType::kVehicle, config, rng));
            break;
        }
        ++id;
      }
      for (int p = 0; p < config.pedestrians; ++p) {
        // VRUs keep simpler kinematics: straight walks or small arcs.
        if (pattern == MotionPattern::kCircularArc) {
          scene.tracks.push_back(
              circular_arc_track(id, AgentType::kPedestrianBicycle, config, rng));
        } else {
          scene.tracks.push_back(
              constant_velocity_track(id, AgentType::kPedestrianBicycle, config, rng));
        }
        ++id;
      }
    }

    const int decision = config.history_steps - 1;
    if (!assemble_sample(scene.id, scene.tracks, decision, schema, scene.frame, &scene.sample)) {
      throw Error("synthetic scene '" + scene.id + "' produced no target");
    }
    out.push_back(std::move(scene));
  }
  return out;
}

std::vector<SceneSample> generate_synthetic(const ScenarioConfig& config, uint64_t seed) {
  std::vector<SceneSample> samples;
  for (auto& scene : generate_synthetic_scenes(config, seed)) {
    samples.push_back(std::move(scene.sample));
  }
  return samples;
}

void write_scene_csv(const std::string& path, const std::vector<SyntheticScene>& scenes) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scene file '" + path + "'");
  out << kSceneCsvHeader << "\n";
  char buf[512];
  for (const auto& scene : scenes) {
    for (const auto& track : scene.tracks) {
      for (size_t k = 0; k < track.states.size(); ++k) {
        const AgentState& s = track.states[k];
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      scene.id.c_str(), track.first_tick + static_cast<int>(k), track.id,
                      agent_type_token(track.type), s.x, s.y, s.vx, s.vy, s.yaw);
        out << buf;
      }
    }
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace heatnet
