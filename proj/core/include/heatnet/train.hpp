#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heatnet/dataset.hpp"
#include "heatnet/model.hpp"

namespace heatnet {

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 10;
  int batch_size = 16;
  uint64_t seed = 1;
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
  int threads = 1;
  double radius = 30.0;
  double val_fraction = 0.2;

  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0;
  double val_ade = 0;
  double val_fde = 0;
};
std::string epoch_log_json(const EpochLog& log);

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> log;
};

// Mini-batch Adam over per-sample forward/backward passes. Deterministic
// given config.seed (fixed shuffle stream; per-sample gradients are reduced
// in sample order whatever the thread count). Throws TrainingError with the
// epoch index when the training loss stops being finite.
TrainResult train(const Dataset& data, const TrainConfig& config, ModelParams params);

struct EvalResult {
  double ade = 0;
  double fde = 0;
  std::vector<double> rmse_by_second;
  int targets = 0;
};

// Forward-only evaluation over every sample; trajectories compared in the
// targets' exclusive frames.
EvalResult evaluate(const Dataset& data, const ModelParams& params, double radius,
                    int threads = 1);

}  // namespace heatnet
