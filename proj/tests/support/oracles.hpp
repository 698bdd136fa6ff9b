#pragma once

// Straight-line reimplementations used as independent references.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace itema2c::oracle {

// Future-impact shares written as the closed-form ratio
// (alpha c_k + 1 - alpha) / (alpha sum(c) + (1 - alpha) K) when no term is
// negative; negative terms are dropped from numerator and denominator.
inline std::vector<double> reweight(const std::vector<double>& c, double alpha, bool* fallback = nullptr) {
  const double k = static_cast<double>(c.size());
  bool any_negative = false;
  for (double x : c) any_negative = any_negative || alpha * x + 1.0 - alpha < 0.0;
  std::vector<double> out(c.size());
  double denom;
  if (!any_negative) {
    denom = alpha * std::accumulate(c.begin(), c.end(), 0.0) + (1.0 - alpha) * k;
  } else {
    denom = 0.0;
    for (double x : c) denom += std::max(0.0, alpha * x + 1.0 - alpha);
  }
  if (fallback) *fallback = !(denom > 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    out[i] = denom > 0.0 ? std::max(0.0, alpha * c[i] + 1.0 - alpha) / denom : 1.0 / k;
  }
  return out;
}

inline double log_sum_exp(const std::vector<double>& s) {
  const double m = *std::max_element(s.begin(), s.end());
  double acc = 0.0;
  for (double x : s) acc += std::exp(x - m);
  return m + std::log(acc);
}

inline double bce(double p, double y) { return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p)); }

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace itema2c::oracle
