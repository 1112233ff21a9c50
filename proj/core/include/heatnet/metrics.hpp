#pragma once

#include <array>
#include <vector>

namespace heatnet {

using Trajectory = std::vector<std::array<double, 2>>;

// Mean Euclidean error over the prediction horizon, for one trajectory.
double ade(const Trajectory& pred, const Trajectory& truth);
// Euclidean error at the final step.
double fde(const Trajectory& pred, const Trajectory& truth);

// Scene-level reporting: averaged over targets. Throws MetricError when empty.
double ade(const std::vector<Trajectory>& preds, const std::vector<Trajectory>& truths);
double fde(const std::vector<Trajectory>& preds, const std::vector<Trajectory>& truths);

// Root-mean-square positional error at horizon step `step` (0-based) across a
// dataset of per-target trajectories. Throws RangeError when any trajectory
// is shorter, MetricError when the set is empty.
double rmse_at(const std::vector<Trajectory>& preds, const std::vector<Trajectory>& truths,
               int step);

}  // namespace heatnet
