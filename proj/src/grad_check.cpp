#include "itema2c/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace itema2c::nn {

GradCheckReport grad_check(ParameterStore& store, const std::function<double(const ParameterStore&)>& loss,
                           const std::function<void(ParameterStore&)>& analytic, const GradCheckOptions& options) {
  store.zero_grad();
  analytic(store);
  std::vector<Matrix> grads;
  grads.reserve(store.size());
  for (const auto& name : store.names()) grads.push_back(store.grad(name) * options.analytic_scale);
  store.zero_grad();

  GradCheckReport report;
  for (std::size_t p = 0; p < store.names().size(); ++p) {
    const auto& name = store.names()[p];
    Matrix& value = store.value(name);
    for (Index i = 0; i < value.size(); ++i) {
      const double original = value.data()[i];
      value.data()[i] = original + options.epsilon;
      const double plus = loss(store);
      value.data()[i] = original - options.epsilon;
      const double minus = loss(store);
      value.data()[i] = original;

      const double numeric = (plus - minus) / (2.0 * options.epsilon);
      const double a = grads[p].data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.checked;
      if (!(rel <= report.max_rel_error)) {
        report.max_rel_error = rel;
        report.worst_param = name;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  report.passed = std::isfinite(report.max_rel_error) && report.max_rel_error <= options.tolerance;
  return report;
}

}  // namespace itema2c::nn
