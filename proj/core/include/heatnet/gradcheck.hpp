#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "heatnet/model.hpp"

namespace heatnet {

struct GradCheckGroup {
  std::string name;
  double worst_rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckGroup> groups;
  double worst() const;
  bool pass(double tol) const { return worst() < tol; }
};

// |a-n| / max(1, |a|, |n|): relative for large magnitudes, absolute near zero.
double relative_error(double analytic, double numeric);

// Test seam: mutates the analytic gradient of the named tensor before the
// comparison (negative-control tests inject a corruption here).
using GradTamper = std::function<void(const std::string& name, std::vector<double>& grad)>;

// End-to-end finite-difference validation of every parameter group of a
// HEAT-I-R micro-instance (4 agents, T_h=5, T_f=3, 16x16 raster): analytic
// gradients from one taped pass vs central differences of the untracked loss.
GradCheckReport gradcheck_model(uint64_t seed, double step = 1e-5,
                                const GradTamper& tamper = nullptr);

}  // namespace heatnet
