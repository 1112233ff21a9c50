#include "heatnet/metrics.hpp"

#include <cmath>
#include <string>

#include "heatnet/error.hpp"

namespace heatnet {

namespace {

void check_pair(const Trajectory& pred, const Trajectory& truth) {
  if (pred.empty()) throw MetricError("metric over an empty trajectory");
  if (pred.size() != truth.size()) {
    throw DimensionError("metric: prediction has " + std::to_string(pred.size()) +
                         " steps, truth " + std::to_string(truth.size()));
  }
}

}  // namespace

double ade(const Trajectory& pred, const Trajectory& truth) {
  check_pair(pred, truth);
  double acc = 0.0;
  for (size_t k = 0; k < pred.size(); ++k) {
    acc += std::hypot(pred[k][0] - truth[k][0], pred[k][1] - truth[k][1]);
  }
  return acc / static_cast<double>(pred.size());
}

double fde(const Trajectory& pred, const Trajectory& truth) {
  check_pair(pred, truth);
  const size_t k = pred.size() - 1;
  return std::hypot(pred[k][0] - truth[k][0], pred[k][1] - truth[k][1]);
}

namespace {

double averaged(const std::vector<Trajectory>& preds, const std::vector<Trajectory>& truths,
                double (*metric)(const Trajectory&, const Trajectory&)) {
  if (preds.size() != truths.size()) {
    throw DimensionError("metric: " + std::to_string(preds.size()) + " predictions vs " +
                         std::to_string(truths.size()) + " truths");
  }
  if (preds.empty()) throw MetricError("metric over an empty target set is undefined");
  double acc = 0.0;
  for (size_t i = 0; i < preds.size(); ++i) acc += metric(preds[i], truths[i]);
  return acc / static_cast<double>(preds.size());
}

}  // namespace

double ade(const std::vector<Trajectory>& preds, const std::vector<Trajectory>& truths) {
  return averaged(preds, truths, static_cast<double (*)(const Trajectory&, const Trajectory&)>(ade));
}

double fde(const std::vector<Trajectory>& preds, const std::vector<Trajectory>& truths) {
  return averaged(preds, truths, static_cast<double (*)(const Trajectory&, const Trajectory&)>(fde));
}

double rmse_at(const std::vector<Trajectory>& preds, const std::vector<Trajectory>& truths,
               int step) {
  if (preds.size() != truths.size()) {
    throw DimensionError("rmse_at: " + std::to_string(preds.size()) + " predictions vs " +
                         std::to_string(truths.size()) + " truths");
  }
  if (preds.empty()) throw MetricError("rmse_at over an empty set is undefined");
  double acc = 0.0;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (step < 0 || static_cast<size_t>(step) >= preds[i].size() ||
        preds[i].size() != truths[i].size()) {
      throw RangeError("rmse_at: step " + std::to_string(step) +
                       " exceeds horizon of sample " + std::to_string(i));
    }
    const double dx = preds[i][static_cast<size_t>(step)][0] - truths[i][static_cast<size_t>(step)][0];
    const double dy = preds[i][static_cast<size_t>(step)][1] - truths[i][static_cast<size_t>(step)][1];
    acc += dx * dx + dy * dy;
  }
  return std::sqrt(acc / static_cast<double>(preds.size()));
}

}  // namespace heatnet
