#pragma once

#include <functional>
#include <string>

#include "itema2c/nn.hpp"

namespace itema2c::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  Index worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  bool passed = true;
};

struct GradCheckOptions {
  double tolerance = 1e-4;
  double epsilon = 1e-4;
  // Elementwise error is |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
  // Multiplies the analytic gradient before comparison; != 1 only to verify
  // that the checker detects a wrong gradient.
  double analytic_scale = 1.0;
};

// Compares the analytic gradient of `loss` (written into store's gradient
// slots by `analytic`) with central finite differences over every scalar in
// `store`. The store's values are restored on return.
GradCheckReport grad_check(ParameterStore& store, const std::function<double(const ParameterStore&)>& loss,
                           const std::function<void(ParameterStore&)>& analytic, const GradCheckOptions& options = {});

}  // namespace itema2c::nn
