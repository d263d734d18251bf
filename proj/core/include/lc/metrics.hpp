#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "lc/errors.hpp"

namespace lc {

// logits[y] minus the best other logit; negative iff misclassified under
// smallest-index argmax, zero on an exact tie.
template <class T>
double example_margin(std::span<const T> logits, std::size_t y) {
  if (logits.size() < 2)
    throw config_error("margin needs at least 2 classes");
  if (y >= logits.size())
    throw config_error("margin target out of range");
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (j == y) continue;
    best_other = std::max(best_other, double(logits[j]));
  }
  return double(logits[y]) - best_other;
}

struct MarginSummary {
  std::vector<double> per_example;
  std::map<std::size_t, double> group_min; // flat group id -> min margin
  double majority_mean = 0.0;
  double minority_mean = 0.0;
  double majority_min = 0.0;
  double minority_min = 0.0;
  double ratio = 0.0; // majority_mean / minority_mean
};

inline MarginSummary group_margins(std::span<const double> margins,
                                   std::span<const std::size_t> group_ids,
                                   std::span<const std::uint8_t>
                                       majority_mask) {
  if (margins.size() != group_ids.size() ||
      margins.size() != majority_mask.size())
    throw config_error("group_margins span length mismatch");
  MarginSummary s;
  s.per_example.assign(margins.begin(), margins.end());
  double maj_sum = 0.0, min_sum = 0.0;
  std::size_t maj_n = 0, min_n = 0;
  double maj_min = std::numeric_limits<double>::infinity();
  double min_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < margins.size(); ++i) {
    auto [it, inserted] = s.group_min.try_emplace(group_ids[i], margins[i]);
    if (!inserted && margins[i] < it->second) it->second = margins[i];
    if (majority_mask[i]) {
      maj_sum += margins[i];
      maj_min = std::min(maj_min, margins[i]);
      ++maj_n;
    } else {
      min_sum += margins[i];
      min_min = std::min(min_min, margins[i]);
      ++min_n;
    }
  }
  if (maj_n == 0) throw config_error("group_margins: no majority examples");
  if (min_n == 0) throw config_error("group_margins: no minority examples");
  s.majority_mean = maj_sum / double(maj_n);
  s.minority_mean = min_sum / double(min_n);
  s.majority_min = maj_min;
  s.minority_min = min_min;
  s.ratio = s.majority_mean / s.minority_mean;
  return s;
}

inline double gba(std::span<const double> per_group_accuracy) {
  if (per_group_accuracy.empty())
    throw config_error("gba needs at least one group");
  double sum = 0.0;
  for (double a : per_group_accuracy) sum += a;
  return sum / double(per_group_accuracy.size());
}

inline double gba(const std::map<std::size_t, double>& per_group_accuracy) {
  if (per_group_accuracy.empty())
    throw config_error("gba needs at least one group");
  double sum = 0.0;
  for (const auto& [g, a] : per_group_accuracy) sum += a;
  return sum / double(per_group_accuracy.size());
}

inline double worst_group(const std::map<std::size_t, double>&
                              per_group_accuracy) {
  if (per_group_accuracy.empty())
    throw config_error("worst_group needs at least one group");
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [g, a] : per_group_accuracy) worst = std::min(worst, a);
  return worst;
}

} // namespace lc
