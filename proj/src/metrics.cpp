#include "itema2c/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace itema2c {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double clamp_unit(double x) { return std::isnan(x) ? x : std::clamp(x, -1.0, 1.0); }

MetricAggregate aggregate(std::span<const WindowStats> runs, double WindowStats::*mean, double WindowStats::*max,
                          double WindowStats::*min) {
  const double n = static_cast<double>(runs.size());
  MetricAggregate a{0.0, 0.0, -INFINITY, INFINITY};
  for (const auto& r : runs) a.mean += r.*mean / n;
  for (const auto& r : runs) {
    a.std += (r.*mean - a.mean) * (r.*mean - a.mean) / n;
    a.max = std::max(a.max, r.*max);
    a.min = std::min(a.min, r.*min);
  }
  a.std = std::sqrt(a.std);
  return a;
}

}  // namespace

double session_total_reward(std::span<const Feedback> trace) {
  if (trace.empty()) throw std::invalid_argument("session_total_reward: session has no requests");
  double total = 0.0;
  for (const auto& f : trace) {
    if (f.size() == 0) throw std::invalid_argument("session_total_reward: empty request");
    total += f.total() / static_cast<double>(f.size());
  }
  return total;
}

WindowStats::WindowStats()
    : mean_reward(kNaN),
      max_reward(kNaN),
      min_reward(kNaN),
      mean_depth(kNaN),
      max_depth(kNaN),
      min_depth(kNaN),
      reward_variance(kNaN) {}

WindowStats window_stats(std::span<const FinishedSession> sessions) {
  WindowStats w;
  w.sessions = sessions.size();
  if (sessions.empty()) return w;
  const double n = static_cast<double>(sessions.size());
  double sum_r = 0.0;
  double sum_d = 0.0;
  w.max_reward = w.min_reward = sessions.front().total_reward;
  w.max_depth = w.min_depth = static_cast<double>(sessions.front().depth);
  for (const auto& s : sessions) {
    const double d = static_cast<double>(s.depth);
    sum_r += s.total_reward;
    sum_d += d;
    w.max_reward = std::max(w.max_reward, s.total_reward);
    w.min_reward = std::min(w.min_reward, s.total_reward);
    w.max_depth = std::max(w.max_depth, d);
    w.min_depth = std::min(w.min_depth, d);
  }
  w.mean_reward = sum_r / n;
  w.mean_depth = sum_d / n;
  double var = 0.0;
  for (const auto& s : sessions) var += (s.total_reward - w.mean_reward) * (s.total_reward - w.mean_reward);
  w.reward_variance = var / n;
  return w;
}

Similarity weight_similarity(const nn::Matrix& u, const nn::Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) throw std::invalid_argument("weight_similarity: shape mismatch");
  if (u.size() == 0) throw std::invalid_argument("weight_similarity: empty input");
  Similarity s{kNaN, kNaN, 0};

  double cos_sum = 0.0;
  std::size_t used = 0;
  for (nn::Index b = 0; b < u.rows(); ++b) {
    const double nu = u.row(b).norm();
    const double nv = v.row(b).norm();
    if (nu == 0.0 || nv == 0.0) {
      ++s.skipped_rows;
      continue;
    }
    cos_sum += u.row(b).dot(v.row(b)) / (nu * nv);
    ++used;
  }
  if (used > 0) s.cosine = clamp_unit(cos_sum / static_cast<double>(used));

  const double n = static_cast<double>(u.size());
  const double mu = u.sum() / n;
  const double mv = v.sum() / n;
  const auto du = u.array() - mu;
  const auto dv = v.array() - mv;
  const double suv = (du * dv).sum();
  const double suu = du.square().sum();
  const double svv = dv.square().sum();
  if (suu > 0.0 && svv > 0.0) s.pearson = clamp_unit(suv / std::sqrt(suu * svv));
  return s;
}

SeedAggregate aggregate_seeds(std::span<const WindowStats> runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate_seeds: no runs");
  SeedAggregate a;
  a.runs = runs.size();
  a.reward = aggregate(runs, &WindowStats::mean_reward, &WindowStats::max_reward, &WindowStats::min_reward);
  a.depth = aggregate(runs, &WindowStats::mean_depth, &WindowStats::max_depth, &WindowStats::min_depth);
  return a;
}

}  // namespace itema2c
