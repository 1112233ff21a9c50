#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <unistd.h>

#include "heatnet/dataset.hpp"
#include "heatnet/gradcheck.hpp"
#include "heatnet/metrics.hpp"
#include "heatnet/model.hpp"
#include "heatnet/params_io.hpp"
#include "heatnet/train.hpp"
#include "oracles.hpp"

using namespace heatnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("heatnet_pred_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter;
};
int TempDir::counter = 0;

ModelDims micro_dims() {
  ModelDims d;
  d.dyn_hidden = 6;
  d.node_proj = 5;
  d.edge_attr_proj = 3;
  d.edge_type_proj = 2;
  d.heads = 2;
  d.interaction_out = 6;
  d.heat_layers = 2;
  d.map_size = 16;
  d.map_feature = 4;
  d.cnn_channels = {2, 2, 2};
  d.dec_hidden = 6;
  return d;
}

struct Fixture {
  Dataset data;
  SceneSample sample;
  InteractionGraph graph;
  const MapRaster* raster = nullptr;
};

Fixture make_fixture(uint64_t seed, int agents_v = 2, int agents_p = 1, double radius = 40.0) {
  ScenarioConfig cfg;
  cfg.history_steps = 5;
  cfg.future_steps = 4;
  cfg.vehicles = agents_v;
  cfg.pedestrians = agents_p;
  cfg.scenes = 1;
  cfg.pattern = MotionPattern::kCircularArc;
  cfg.map_size_px = 16;
  cfg.meters_per_pixel = 6.0;
  Fixture f;
  f.data = dataset_from_scenes(generate_synthetic_scenes(cfg, seed));
  f.sample = f.data.samples.front();
  f.graph = build_graph(f.sample, radius);
  f.raster = f.data.raster_for(f.sample);
  return f;
}

}  // namespace

TEST_CASE("variant tokens round trip; unknown rejected") {
  for (Variant v : {Variant::kR, Variant::kGat, Variant::kGatR, Variant::kHeat,
                    Variant::kHeatR, Variant::kHeatIR}) {
    CHECK(variant_from_token(variant_token(v)) == v);
  }
  CHECK_THROWS_AS(variant_from_token("HEAT-X"), ConfigError);
}

TEST_CASE("decoder input widths chain with the variant") {
  const ModelDims d = micro_dims();
  CHECK(d.decoder_input_width(Variant::kR) == 6);
  CHECK(d.decoder_input_width(Variant::kGat) == 6);
  CHECK(d.decoder_input_width(Variant::kHeat) == 6);
  CHECK(d.decoder_input_width(Variant::kGatR) == 12);
  CHECK(d.decoder_input_width(Variant::kHeatR) == 12);
  CHECK(d.decoder_input_width(Variant::kHeatIR) == 16);
  ModelDims bad = d;
  bad.interaction_out = 7;  // not divisible by heads
  CHECK_THROWS_AS(bad.validate(Variant::kHeat), ConfigError);
}

TEST_CASE("variant R with zero decoder weights yields all-zero trajectories") {
  Fixture f = make_fixture(3);
  ModelParams params = init_model(Variant::kR, micro_dims(), 5, 4, 1);
  for (auto& dec : params.decoders) {
    dec.w_proj = Tensor::zeros(dec.w_proj.shape());
    dec.b_proj = Tensor::zeros(dec.b_proj.shape());
  }
  const PredictionSet pred = forward(f.sample, f.graph, params, nullptr);
  REQUIRE(pred.target_count() > 0);
  for (const auto& traj : pred.trajectories) {
    for (int t = 0; t < traj.dim(0); ++t) {
      CHECK(traj.at(t, 0) == 0.0);
      CHECK(traj.at(t, 1) == 0.0);
    }
  }
}

TEST_CASE("HEAT-I-R runs on a single-agent scene (self-loop only)") {
  Fixture f = make_fixture(5, 1, 0);
  REQUIRE(f.sample.agent_count() == 1);
  const ModelParams params = init_model(Variant::kHeatIR, micro_dims(), 5, 4, 2);
  const PredictionSet pred = forward(f.sample, f.graph, params, f.raster);
  REQUIRE(pred.target_count() == 1);
  CHECK(pred.trajectories[0].shape() == std::vector<int>{4, 2});
}

TEST_CASE("HEAT-I-R needs a raster") {
  Fixture f = make_fixture(7);
  const ModelParams params = init_model(Variant::kHeatIR, micro_dims(), 5, 4, 2);
  CHECK_THROWS_AS(forward(f.sample, f.graph, params, nullptr), ConfigError);
}

TEST_CASE("forward matches the channel-by-channel composition") {
  Fixture f = make_fixture(11, 2, 1);
  const ModelParams params = init_model(Variant::kHeatIR, micro_dims(), 5, 4, 3);
  ForwardTrace trace;
  const PredictionSet pred = forward(f.sample, f.graph, params, f.raster, &trace);
  CHECK(trace.encode_map_calls == 1);

  // compose the channels by hand from the module-level operations
  std::vector<Tensor> dynamics;
  for (int i = 0; i < f.sample.agent_count(); ++i) {
    const int type = static_cast<int>(f.sample.agent_types[static_cast<size_t>(i)]);
    dynamics.push_back(gru_encode(f.sample.history_matrix(i),
                                  params.encoders[static_cast<size_t>(type)]));
  }
  const Tensor nodes = concat(dynamics, 0);
  const Tensor interaction = heat_stack(f.graph, nodes, f.graph.node_type_ids(),
                                        params.heat_layers);
  const Tensor map_feature = encode_map(*f.raster, params.cnn);

  const auto targets = f.sample.target_indices();
  REQUIRE(static_cast<int>(targets.size()) == pred.target_count());
  for (size_t k = 0; k < targets.size(); ++k) {
    const int idx = targets[k];
    const Tensor gated = gate_select(map_feature, f.sample.map_attrs[static_cast<size_t>(idx)],
                                     params.gate);
    const Tensor feature = concat({dynamics[static_cast<size_t>(idx)],
                                   take_rows(interaction, {idx}), gated}, 1);
    const int type = static_cast<int>(f.sample.agent_types[static_cast<size_t>(idx)]);
    const Tensor expect = lstm_decode(feature, params.decoders[static_cast<size_t>(type)],
                                      f.sample.future_steps);
    const Tensor& got = pred.trajectories[k];
    for (int t = 0; t < expect.dim(0); ++t) {
      CHECK(got.at(t, 0) == doctest::Approx(expect.at(t, 0)).epsilon(1e-12));
      CHECK(got.at(t, 1) == doctest::Approx(expect.at(t, 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("mse_loss identities") {
  Fixture f = make_fixture(13, 1, 0);
  PredictionSet exact;
  exact.target_indices = f.sample.target_indices();
  for (int idx : exact.target_indices) {
    std::vector<double> v;
    for (const auto& p : f.sample.futures[static_cast<size_t>(idx)]) {
      v.push_back(p[0]);
      v.push_back(p[1]);
    }
    exact.trajectories.push_back(Tensor({f.sample.future_steps, 2}, std::move(v)));
  }
  CHECK(mse_loss(exact, f.sample).value() == 0.0);

  PredictionSet offset = exact;
  for (auto& traj : offset.trajectories) {
    std::vector<double> v(traj.values());
    for (size_t i = 0; i < v.size(); i += 2) v[i] += 1.0;  // 1 m x-offset
    traj = Tensor(traj.shape(), std::move(v));
  }
  CHECK(mse_loss(offset, f.sample).value() == doctest::Approx(1.0).epsilon(1e-12));

  // random predictions match a scalar accumulation oracle
  std::mt19937_64 rng(17);
  PredictionSet random = exact;
  double acc = 0.0;
  int64_t steps = 0;
  for (size_t k = 0; k < random.trajectories.size(); ++k) {
    const int idx = random.target_indices[k];
    Tensor t = oracle::random_tensor({f.sample.future_steps, 2}, rng, -10, 10);
    for (int s = 0; s < f.sample.future_steps; ++s) {
      const auto& truth = f.sample.futures[static_cast<size_t>(idx)][static_cast<size_t>(s)];
      const double dx = t.at(s, 0) - truth[0], dy = t.at(s, 1) - truth[1];
      acc += dx * dx + dy * dy;
      ++steps;
    }
    random.trajectories[k] = std::move(t);
  }
  CHECK(mse_loss(random, f.sample).value() ==
        doctest::Approx(acc / static_cast<double>(steps)).epsilon(1e-12));
}

TEST_CASE("metric identities") {
  using T = Trajectory;
  const T truth = {{0, 0}, {1, 0}, {2, 0}};
  CHECK(ade(truth, truth) == 0.0);
  CHECK(fde(truth, truth) == 0.0);

  T offset;
  for (const auto& p : truth) offset.push_back({p[0] + 0.3, p[1] + 0.4});
  CHECK(ade(offset, truth) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fde(offset, truth) == doctest::Approx(0.5).epsilon(1e-12));

  // two samples with errors 3 m and 4 m at the probe step -> sqrt(12.5)
  const T t1 = {{0, 0}, {0, 0}};
  const T p1 = {{0, 0}, {3, 0}};
  const T p2 = {{0, 0}, {0, 4}};
  CHECK(rmse_at({p1, p2}, {t1, t1}, 1) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));

  CHECK_THROWS_AS(ade(std::vector<T>{}, std::vector<T>{}), MetricError);
  CHECK_THROWS_AS(rmse_at({p1}, {t1}, 5), RangeError);
}

TEST_CASE("variant nesting: zero map feature reduces HEAT-I-R to HEAT-R") {
  Fixture f = make_fixture(19, 2, 1);
  ModelParams full = init_model(Variant::kHeatIR, micro_dims(), 5, 4, 7);
  // zero CNN projection makes the shared map feature exactly zero, so the
  // gated per-agent map features are exactly zero too
  full.cnn.fc_weight = Tensor::zeros(full.cnn.fc_weight.shape());
  full.cnn.fc_bias = Tensor::zeros(full.cnn.fc_bias.shape());

  ModelParams reduced = init_model(Variant::kHeatR, micro_dims(), 5, 4, 99);
  reduced.encoders = full.encoders;
  reduced.heat_layers = full.heat_layers;
  // decoder weights: reuse the HEAT-I-R rows for the [r || g] inputs
  const int keep = micro_dims().decoder_input_width(Variant::kHeatR);
  for (int t = 0; t < kNumAgentTypes; ++t) {
    auto& rd = reduced.decoders[static_cast<size_t>(t)];
    const auto& fd = full.decoders[static_cast<size_t>(t)];
    auto shrink = [&](const Tensor& w) {
      std::vector<double> v;
      for (int i = 0; i < keep; ++i)
        for (int j = 0; j < w.dim(1); ++j) v.push_back(w.at(i, j));
      return Tensor({keep, w.dim(1)}, std::move(v));
    };
    rd.w_input = shrink(fd.w_input);
    rd.u_input = fd.u_input;
    rd.b_input = fd.b_input;
    rd.w_forget = shrink(fd.w_forget);
    rd.u_forget = fd.u_forget;
    rd.b_forget = fd.b_forget;
    rd.w_output = shrink(fd.w_output);
    rd.u_output = fd.u_output;
    rd.b_output = fd.b_output;
    rd.w_cand = shrink(fd.w_cand);
    rd.u_cand = fd.u_cand;
    rd.b_cand = fd.b_cand;
    rd.w_proj = fd.w_proj;
    rd.b_proj = fd.b_proj;
  }

  const PredictionSet a = forward(f.sample, f.graph, full, f.raster);
  const PredictionSet b = forward(f.sample, f.graph, reduced, nullptr);
  REQUIRE(a.target_count() == b.target_count());
  for (int k = 0; k < a.target_count(); ++k) {
    for (int t = 0; t < a.trajectories[static_cast<size_t>(k)].dim(0); ++t) {
      CHECK(a.trajectories[static_cast<size_t>(k)].at(t, 0) ==
            b.trajectories[static_cast<size_t>(k)].at(t, 0));
      CHECK(a.trajectories[static_cast<size_t>(k)].at(t, 1) ==
            b.trajectories[static_cast<size_t>(k)].at(t, 1));
    }
  }
}

TEST_CASE("variant nesting: decoder that ignores interaction reduces HEAT-R to R") {
  Fixture f = make_fixture(23, 2, 1);
  ModelParams heat_r = init_model(Variant::kHeatR, micro_dims(), 5, 4, 31);
  const int f_r = micro_dims().dyn_hidden;
  // zero the interaction input rows of every decoder gate
  for (auto& dec : heat_r.decoders) {
    auto zero_tail = [&](Tensor& w) {
      std::vector<double> v(w.values());
      for (int i = f_r; i < w.dim(0); ++i)
        for (int j = 0; j < w.dim(1); ++j) v[static_cast<size_t>(i) * w.dim(1) + j] = 0.0;
      w = Tensor(w.shape(), std::move(v));
    };
    zero_tail(dec.w_input);
    zero_tail(dec.w_forget);
    zero_tail(dec.w_output);
    zero_tail(dec.w_cand);
  }

  ModelParams r_only = init_model(Variant::kR, micro_dims(), 5, 4, 41);
  r_only.encoders = heat_r.encoders;
  for (int t = 0; t < kNumAgentTypes; ++t) {
    auto& rd = r_only.decoders[static_cast<size_t>(t)];
    const auto& hd = heat_r.decoders[static_cast<size_t>(t)];
    auto head_rows = [&](const Tensor& w) {
      std::vector<double> v;
      for (int i = 0; i < f_r; ++i)
        for (int j = 0; j < w.dim(1); ++j) v.push_back(w.at(i, j));
      return Tensor({f_r, w.dim(1)}, std::move(v));
    };
    rd.w_input = head_rows(hd.w_input);
    rd.u_input = hd.u_input;
    rd.b_input = hd.b_input;
    rd.w_forget = head_rows(hd.w_forget);
    rd.u_forget = hd.u_forget;
    rd.b_forget = hd.b_forget;
    rd.w_output = head_rows(hd.w_output);
    rd.u_output = hd.u_output;
    rd.b_output = hd.b_output;
    rd.w_cand = head_rows(hd.w_cand);
    rd.u_cand = hd.u_cand;
    rd.b_cand = hd.b_cand;
    rd.w_proj = hd.w_proj;
    rd.b_proj = hd.b_proj;
  }

  const PredictionSet a = forward(f.sample, f.graph, heat_r, nullptr);
  const PredictionSet b = forward(f.sample, f.graph, r_only, nullptr);
  REQUIRE(a.target_count() == b.target_count());
  for (int k = 0; k < a.target_count(); ++k) {
    for (int t = 0; t < a.trajectories[static_cast<size_t>(k)].dim(0); ++t) {
      CHECK(a.trajectories[static_cast<size_t>(k)].at(t, 0) ==
            b.trajectories[static_cast<size_t>(k)].at(t, 0));
      CHECK(a.trajectories[static_cast<size_t>(k)].at(t, 1) ==
            b.trajectories[static_cast<size_t>(k)].at(t, 1));
    }
  }
}

TEST_CASE("simultaneity: removing a far agent leaves close targets unchanged") {
  // two interacting vehicles plus one far-away vehicle
  ScenarioConfig cfg;
  cfg.history_steps = 5;
  cfg.future_steps = 3;
  cfg.vehicles = 2;
  cfg.pedestrians = 0;
  cfg.scenes = 1;
  cfg.pattern = MotionPattern::kConstantVelocity;
  cfg.map_size_px = 16;
  cfg.meters_per_pixel = 6.0;
  auto scenes = generate_synthetic_scenes(cfg, 101);
  SceneSample near = scenes[0].sample;

  SceneSample with_far = near;
  AgentState far;
  far.x = 500;
  far.y = 500;
  far.vx = 1;
  far.yaw = 0;
  with_far.agent_ids.push_back(99);
  with_far.agent_types.push_back(AgentType::kVehicle);
  with_far.histories.push_back(std::vector<AgentState>(5, AgentState{0, 0, 1, 0, 0}));
  with_far.current.push_back(far);
  with_far.futures.emplace_back();
  with_far.target_mask.push_back(false);
  with_far.vehicle_mask.push_back(true);
  with_far.pedestrian_mask.push_back(false);
  with_far.map_attrs.push_back(vehicle_to_map_attr(far, with_far.map_frame));

  ModelDims dims = micro_dims();
  dims.heat_layers = 1;  // locality is exact for a single layer
  const ModelParams params = init_model(Variant::kHeatR, dims, 5, 3, 51);
  const double radius = 40.0;
  const PredictionSet a = forward(near, build_graph(near, radius), params, nullptr);
  const PredictionSet b = forward(with_far, build_graph(with_far, radius), params, nullptr);
  REQUIRE(a.target_count() == b.target_count());  // the far agent is not a target
  for (int k = 0; k < a.target_count(); ++k) {
    for (int t = 0; t < 3; ++t) {
      CHECK(a.trajectories[static_cast<size_t>(k)].at(t, 0) ==
            doctest::Approx(b.trajectories[static_cast<size_t>(k)].at(t, 0)).epsilon(1e-12));
      CHECK(a.trajectories[static_cast<size_t>(k)].at(t, 1) ==
            doctest::Approx(b.trajectories[static_cast<size_t>(k)].at(t, 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("prediction global frame equals the inverse exclusive transform") {
  Fixture f = make_fixture(29, 2, 0);
  const ModelParams params = init_model(Variant::kR, micro_dims(), 5, 4, 61);
  const PredictionSet pred = forward(f.sample, f.graph, params, nullptr);
  const auto local = pred.local_values();
  const auto global = pred.global_values(f.sample);
  for (size_t k = 0; k < local.size(); ++k) {
    const AgentState& anchor = f.sample.current[static_cast<size_t>(pred.target_indices[k])];
    for (size_t t = 0; t < local[k].size(); ++t) {
      const auto expect = local_to_global(anchor, local[k][t][0], local[k][t][1]);
      CHECK(global[k][t][0] == doctest::Approx(expect[0]).epsilon(1e-12));
      CHECK(global[k][t][1] == doctest::Approx(expect[1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("parameter files round trip bit-exactly") {
  TempDir dir;
  const ModelParams params = init_model(Variant::kHeatIR, micro_dims(), 5, 4, 71);
  const auto path = (dir.path / "params.bin").string();
  save_params(params, path);
  const ModelParams back = load_params(path);
  CHECK(back.variant == params.variant);
  CHECK(back.history_steps == params.history_steps);
  CHECK(back.future_steps == params.future_steps);

  std::vector<std::pair<std::string, const Tensor*>> a, b;
  params.visit([&](const std::string& n, const Tensor& t) { a.emplace_back(n, &t); });
  back.visit([&](const std::string& n, const Tensor& t) { b.emplace_back(n, &t); });
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    REQUIRE(a[i].second->shape() == b[i].second->shape());
    CHECK(a[i].second->values() == b[i].second->values());
  }

  // a second save produces identical bytes
  const auto path2 = (dir.path / "params2.bin").string();
  save_params(back, path2);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
}

TEST_CASE("parameter file errors: truncation and variant mismatch") {
  TempDir dir;
  const ModelParams params = init_model(Variant::kHeat, micro_dims(), 5, 4, 81);
  const auto path = (dir.path / "params.bin").string();
  save_params(params, path);

  // truncate
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  const auto cut = (dir.path / "cut.bin").string();
  std::ofstream(cut, std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  CHECK_THROWS_AS(load_params(cut), CompatibilityError);

  // wrong magic
  const auto junk = (dir.path / "junk.bin").string();
  std::ofstream(junk, std::ios::binary) << "definitely not a parameter file";
  CHECK_THROWS_AS(load_params(junk), CompatibilityError);

  // variant mismatch on an otherwise valid file
  CHECK_THROWS_AS(load_params(path, Variant::kHeatIR), CompatibilityError);
  CHECK(load_params(path, Variant::kHeat).variant == Variant::kHeat);
}

TEST_CASE("train: zero learning rate leaves parameters bit-identical") {
  ScenarioConfig cfg;
  cfg.history_steps = 5;
  cfg.future_steps = 3;
  cfg.scenes = 4;
  cfg.vehicles = 1;
  cfg.pedestrians = 1;
  cfg.pattern = MotionPattern::kMixed;
  cfg.map_size_px = 16;
  cfg.meters_per_pixel = 6.0;
  const Dataset data = dataset_from_scenes(generate_synthetic_scenes(cfg, 91));

  const ModelParams init = init_model(Variant::kR, micro_dims(), 5, 3, 92);
  TrainConfig tc;
  tc.learning_rate = 0.0;
  tc.epochs = 1;
  tc.batch_size = 2;
  tc.val_fraction = 0.0;
  tc.radius = 30.0;
  const TrainResult result = train(data, tc, init);
  std::vector<const Tensor*> a, b;
  init.visit([&](const std::string&, const Tensor& t) { a.push_back(&t); });
  result.params.visit([&](const std::string&, const Tensor& t) { b.push_back(&t); });
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i]->values() == b[i]->values());
  CHECK(result.log.size() == 1);
}

TEST_CASE("train: same seed gives identical loss curves; threads do not change them") {
  ScenarioConfig cfg;
  cfg.history_steps = 5;
  cfg.future_steps = 3;
  cfg.scenes = 6;
  cfg.vehicles = 2;
  cfg.pedestrians = 0;
  cfg.pattern = MotionPattern::kYielding;
  cfg.map_size_px = 16;
  cfg.meters_per_pixel = 6.0;
  const Dataset data = dataset_from_scenes(generate_synthetic_scenes(cfg, 93));

  const ModelParams init = init_model(Variant::kHeatR, micro_dims(), 5, 3, 94);
  TrainConfig tc;
  tc.learning_rate = 1e-3;
  tc.epochs = 3;
  tc.batch_size = 3;
  tc.val_fraction = 0.0;
  tc.radius = 40.0;
  const TrainResult r1 = train(data, tc, init);
  const TrainResult r2 = train(data, tc, init);
  TrainConfig threaded = tc;
  threaded.threads = 4;
  const TrainResult r3 = train(data, threaded, init);
  REQUIRE(r1.log.size() == r2.log.size());
  REQUIRE(r1.log.size() == r3.log.size());
  for (size_t e = 0; e < r1.log.size(); ++e) {
    CHECK(r1.log[e].train_loss == r2.log[e].train_loss);
    CHECK(r1.log[e].train_loss == r3.log[e].train_loss);
    CHECK(r1.log[e].val_ade == r3.log[e].val_ade);
  }
}

TEST_CASE("train: non-finite loss raises a training error with the epoch") {
  ScenarioConfig cfg;
  cfg.history_steps = 5;
  cfg.future_steps = 3;
  cfg.scenes = 2;
  cfg.vehicles = 1;
  cfg.pedestrians = 0;
  cfg.pattern = MotionPattern::kConstantVelocity;
  const Dataset data = dataset_from_scenes(generate_synthetic_scenes(cfg, 95));

  ModelParams init = init_model(Variant::kR, micro_dims(), 5, 3, 96);
  for (auto& dec : init.decoders) {
    dec.w_proj = Tensor::full(dec.w_proj.shape(), 1e200);  // blows the loss up to inf
  }
  TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = 2;
  tc.val_fraction = 0.0;
  try {
    train(data, tc, init);
    FAIL("expected TrainingError");
  } catch (const TrainingError& e) {
    CHECK(e.epoch == 0);
  }
}

TEST_CASE("epoch log serializes as JSON lines") {
  const EpochLog log{3, 0.5, 1.25, 2.5};
  CHECK(epoch_log_json(log) ==
        "{\"epoch\":3,\"train_loss\":0.5,\"val_ade\":1.25,\"val_fde\":2.5}");
}

TEST_CASE("gradcheck micro-instance passes; groups listed exactly once") {
  const GradCheckReport report = gradcheck_model(7, 1e-5);
  CHECK(report.pass(1e-5));
  std::set<std::string> names;
  for (const auto& g : report.groups) CHECK(names.insert(g.name).second);
  // the report covers every parameter group of the micro model
  const ModelParams shape = init_model(Variant::kHeatIR, micro_dims(), 5, 4, 1);
  size_t expected = 0;
  shape.visit([&](const std::string&, const Tensor&) { ++expected; });
  CHECK(report.groups.size() == expected);
}

TEST_CASE("gradcheck negative control") {
  const GradCheckReport bad = gradcheck_model(7, 1e-5, [](const std::string& name,
                                                          std::vector<double>& grad) {
    if (name == "gate.weight" && !grad.empty()) grad[0] += 1.0;
  });
  CHECK_FALSE(bad.pass(1e-5));
}
