#include "heatnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "heatnet/log.hpp"
#include "heatnet/metrics.hpp"
#include "heatnet/parallel.hpp"

namespace heatnet {

void TrainConfig::validate() const {
  if (learning_rate < 0) throw ConfigError("train: learning rate must be non-negative");
  if (epochs < 0) throw ConfigError("train: epochs must be non-negative");
  if (batch_size < 1) throw ConfigError("train: batch size must be positive");
  if (threads < 1) throw ConfigError("train: threads must be positive");
  if (radius <= 0) throw ConfigError("train: radius must be positive");
  if (val_fraction < 0 || val_fraction >= 1) {
    throw ConfigError("train: val fraction must be in [0, 1)");
  }
  if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1 || epsilon <= 0) {
    throw ConfigError("train: bad optimizer hyperparameters");
  }
}

std::string epoch_log_json(const EpochLog& log) {
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "{\"epoch\":%d,\"train_loss\":%.17g,\"val_ade\":%.17g,\"val_fde\":%.17g}",
                log.epoch, log.train_loss, log.val_ade, log.val_fde);
  return buf;
}

namespace {

struct SampleGrads {
  double loss = 0;
  std::vector<std::vector<double>> grads;  // per parameter tensor, visit order
};

std::vector<InteractionGraph> build_graphs(const std::vector<SceneSample>& samples,
                                           double radius) {
  std::vector<InteractionGraph> graphs;
  graphs.reserve(samples.size());
  for (const auto& s : samples) graphs.push_back(build_graph(s, radius));
  return graphs;
}

SampleGrads sample_pass(const SceneSample& sample, const InteractionGraph& graph,
                        const MapRaster* raster, const ModelParams& params) {
  Tape tape;
  std::vector<std::pair<std::string, int>> leaves;
  const ModelParams tracked = track_params(tape, params, &leaves);
  const PredictionSet pred = forward(sample, graph, tracked, raster);
  const Tensor loss = mse_loss(pred, sample);
  const GradMap grads = tape.backward(loss);
  SampleGrads out;
  out.loss = loss.value();
  out.grads.reserve(leaves.size());
  for (const auto& [name, node] : leaves) {
    out.grads.push_back(grads.at_node(node).values());
  }
  return out;
}

struct AdamState {
  std::vector<std::vector<double>> m, v;
  int64_t step = 0;
};

void adam_step(ModelParams& params, const std::vector<std::vector<double>>& grads,
               AdamState& state, const TrainConfig& cfg) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  size_t slot = 0;
  params.visit([&](const std::string&, Tensor& t) {
    const auto& g = grads[slot];
    auto& m = state.m[slot];
    auto& v = state.v[slot];
    std::vector<double> next(t.values());
    for (size_t i = 0; i < next.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      next[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.epsilon);
    }
    t = Tensor(t.shape(), std::move(next));
    ++slot;
  });
}

}  // namespace

EvalResult evaluate(const Dataset& data, const ModelParams& params, double radius,
                    int threads) {
  if (data.empty()) throw MetricError("evaluate: empty dataset");
  const auto graphs = build_graphs(data.samples, radius);
  std::vector<std::vector<Trajectory>> preds(data.samples.size());
  std::vector<std::vector<Trajectory>> truths(data.samples.size());
  parallel_for(static_cast<int>(data.samples.size()), threads, [&](int i) {
    const auto& sample = data.samples[static_cast<size_t>(i)];
    const PredictionSet pred = forward(sample, graphs[static_cast<size_t>(i)], params,
                                       data.raster_for(sample));
    preds[static_cast<size_t>(i)] = pred.local_values();
    for (int idx : pred.target_indices) {
      truths[static_cast<size_t>(i)].push_back(sample.futures[static_cast<size_t>(idx)]);
    }
  });
  std::vector<Trajectory> flat_preds, flat_truths;
  for (size_t i = 0; i < preds.size(); ++i) {
    flat_preds.insert(flat_preds.end(), preds[i].begin(), preds[i].end());
    flat_truths.insert(flat_truths.end(), truths[i].begin(), truths[i].end());
  }
  EvalResult out;
  out.targets = static_cast<int>(flat_preds.size());
  out.ade = ade(flat_preds, flat_truths);
  out.fde = fde(flat_preds, flat_truths);
  const double tick = data.samples.front().tick;
  const int future_steps = data.samples.front().future_steps;
  const int steps_per_second = std::max(1, static_cast<int>(std::lround(1.0 / tick)));
  for (int sec = 1; sec * steps_per_second <= future_steps; ++sec) {
    out.rmse_by_second.push_back(rmse_at(flat_preds, flat_truths, sec * steps_per_second - 1));
  }
  return out;
}

TrainResult train(const Dataset& data, const TrainConfig& config, ModelParams params) {
  config.validate();
  if (data.empty()) throw ConfigError("train: empty dataset");

  auto [train_set, val_set] = split_dataset(data, config.val_fraction);
  if (train_set.empty()) throw ConfigError("train: split left no training samples");
  const bool val_on_train = val_set.empty();
  const Dataset& val = val_on_train ? train_set : val_set;

  const auto graphs = build_graphs(train_set.samples, config.radius);
  const int n = static_cast<int>(train_set.samples.size());

  AdamState adam;
  params.visit([&](const std::string&, Tensor& t) {
    adam.m.emplace_back(static_cast<size_t>(t.size()), 0.0);
    adam.v.emplace_back(static_cast<size_t>(t.size()), 0.0);
  });

  std::mt19937_64 shuffle_rng(config.seed);
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.params = std::move(params);
  result.log.reserve(static_cast<size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (int start = 0; start < n; start += config.batch_size) {
      const int count = std::min(config.batch_size, n - start);
      std::vector<SampleGrads> per_sample(static_cast<size_t>(count));
      parallel_for(count, config.threads, [&](int k) {
        const int i = order[static_cast<size_t>(start + k)];
        const auto& sample = train_set.samples[static_cast<size_t>(i)];
        per_sample[static_cast<size_t>(k)] =
            sample_pass(sample, graphs[static_cast<size_t>(i)],
                        train_set.raster_for(sample), result.params);
      });
      // Reduce in sample order, then average.
      std::vector<std::vector<double>> grads = std::move(per_sample[0].grads);
      double batch_loss = per_sample[0].loss;
      for (int k = 1; k < count; ++k) {
        batch_loss += per_sample[static_cast<size_t>(k)].loss;
        for (size_t s = 0; s < grads.size(); ++s) {
          const auto& g = per_sample[static_cast<size_t>(k)].grads[s];
          for (size_t i = 0; i < g.size(); ++i) grads[s][i] += g[i];
        }
      }
      const double inv = 1.0 / count;
      for (auto& g : grads)
        for (auto& x : g) x *= inv;
      batch_loss *= inv;
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("training diverged (non-finite loss) at epoch " +
                            std::to_string(epoch), epoch);
      }
      epoch_loss += batch_loss * count;
      if (config.learning_rate > 0) adam_step(result.params, grads, adam, config);
    }
    epoch_loss /= n;

    const EvalResult val_metrics = evaluate(val, result.params, config.radius, config.threads);
    EpochLog log{epoch, epoch_loss, val_metrics.ade, val_metrics.fde};
    result.log.push_back(log);
    log_info("epoch " + std::to_string(epoch) + ": train_loss=" + std::to_string(epoch_loss) +
             " val_ade=" + std::to_string(val_metrics.ade) +
             " val_fde=" + std::to_string(val_metrics.fde) +
             (val_on_train ? " (val==train)" : ""));
  }
  return result;
}

}  // namespace heatnet
