#include "itema2c/policy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace itema2c {

std::vector<double> log_softmax(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("softmax over an empty candidate set");
  const Eigen::Map<const Eigen::ArrayXd> s(scores.data(), static_cast<Eigen::Index>(scores.size()));
  const double m = s.maxCoeff();
  const double lse = m + std::log((s - m).exp().sum());
  std::vector<double> out(scores.size());
  Eigen::Map<Eigen::ArrayXd>(out.data(), s.size()) = s - lse;
  return out;
}

std::vector<double> softmax(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("softmax over an empty candidate set");
  const Eigen::Map<const Eigen::ArrayXd> s(scores.data(), static_cast<Eigen::Index>(scores.size()));
  std::vector<double> out(scores.size());
  Eigen::Map<Eigen::ArrayXd> e(out.data(), s.size());
  e = (s - s.maxCoeff()).exp();
  e /= e.sum();
  return out;
}

std::vector<ItemId> top_k(std::span<const double> scores, std::size_t k) {
  if (k > scores.size()) throw std::invalid_argument("list size exceeds the candidate pool");
  std::vector<std::int32_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::int32_t a, std::int32_t b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); });
  std::vector<ItemId> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(ItemId{idx[i]});
  return out;
}

namespace {

std::vector<ItemId> draw_without_replacement(std::span<const double> scores, std::vector<double> weight, std::size_t k,
                                             Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<ItemId> out;
  out.reserve(k);
  for (std::size_t pick = 0; pick < k; ++pick) {
    double total = 0.0;
    for (double w : weight) total += w;
    double u = unif(rng) * total;
    std::size_t chosen = weight.size();
    std::size_t last_positive = weight.size();
    for (std::size_t i = 0; i < weight.size(); ++i) {
      if (weight[i] <= 0.0) continue;
      last_positive = i;
      if (u < weight[i]) {
        chosen = i;
        break;
      }
      u -= weight[i];
    }
    if (chosen == weight.size()) chosen = last_positive;  // rounding at the tail
    if (chosen == weight.size()) {
      // Every remaining weight underflowed; take the best remaining score.
      double best = -INFINITY;
      for (std::size_t i = 0; i < weight.size(); ++i) {
        const bool taken = std::any_of(out.begin(), out.end(), [&](ItemId id) { return id.index == static_cast<std::int32_t>(i); });
        if (!taken && scores[i] > best) {
          best = scores[i];
          chosen = i;
        }
      }
    }
    out.push_back(ItemId{static_cast<std::int32_t>(chosen)});
    weight[chosen] = 0.0;
  }
  return out;
}

}  // namespace

std::vector<ItemId> sample_without_replacement(std::span<const double> scores, std::size_t k, Rng& rng) {
  if (k > scores.size()) throw std::invalid_argument("list size exceeds the candidate pool");
  return draw_without_replacement(scores, softmax(scores), k, rng);
}

ListSelection select_list(std::span<const double> scores, std::size_t k, ActMode mode, Rng& rng) {
  if (k > scores.size()) throw std::invalid_argument("list size exceeds the candidate pool");
  ListSelection sel;
  const auto logp = log_softmax(scores);
  std::vector<ItemId> items;
  if (mode == ActMode::greedy) {
    items = top_k(scores, k);
  } else {
    std::vector<double> weight(logp.size());
    Eigen::Map<Eigen::ArrayXd>(weight.data(), static_cast<Eigen::Index>(weight.size())) =
        Eigen::Map<const Eigen::ArrayXd>(logp.data(), static_cast<Eigen::Index>(logp.size())).exp();
    items = draw_without_replacement(scores, std::move(weight), k, rng);
  }
  for (const auto& item : items) sel.log_probs.push_back(logp[static_cast<std::size_t>(item.index)]);
  sel.list = RecList(std::move(items));
  return sel;
}

}  // namespace itema2c
