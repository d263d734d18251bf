#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lc/errors.hpp"
#include "lc/numerics.hpp"

namespace lc {

struct GceConfig {
  double q = 0.7;
};

// Per-class additive offsets ln P̂(c, a_x), shifted so the largest entry is
// exactly zero. The shift cancels in every loss below, and it makes a uniform
// prior produce all-zero offsets, so lc_loss degenerates to ce_loss bit for
// bit.
struct CorrectionRow {
  std::vector<double> offsets;

  static CorrectionRow from_probs(std::span<const double> probs,
                                  double floor_epsilon = 1e-8) {
    if (probs.empty()) throw config_error("correction row needs >= 1 class");
    if (floor_epsilon <= 0.0)
      throw config_error("correction floor must be positive");
    CorrectionRow row;
    row.offsets.resize(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
      row.offsets[i] = std::log(std::max(probs[i], floor_epsilon));
    const double top = *std::max_element(row.offsets.begin(),
                                         row.offsets.end());
    for (double& o : row.offsets) o -= top;
    return row;
  }

  static CorrectionRow uniform(std::size_t num_classes) {
    CorrectionRow row;
    row.offsets.assign(num_classes, 0.0);
    return row;
  }
};

template <class T>
struct LossResult {
  T loss;
  std::vector<T> grad;
};

namespace detail {
template <class T>
inline void check_target(std::size_t n, std::size_t y) {
  if (n < 2) throw config_error("loss needs at least 2 classes");
  if (y >= n)
    throw config_error("target class " + std::to_string(y) +
                       " out of range for " + std::to_string(n) + " classes");
}
} // namespace detail

template <class T>
T ce_loss(std::span<const T> logits, std::size_t y, std::span<T> grad_out) {
  detail::check_target<T>(logits.size(), y);
  softmax(logits, grad_out);
  const T loss = log_sum_exp(logits) - logits[y];
  grad_out[y] -= T(1);
  return loss;
}

template <class T>
LossResult<T> ce_loss(std::span<const T> logits, std::size_t y) {
  LossResult<T> r;
  r.grad.resize(logits.size());
  r.loss = ce_loss(logits, y, std::span<T>(r.grad));
  return r;
}

// Takes the ERM branch's softmax probabilities; the returned gradient is
// with respect to the logits those probabilities came from.
template <class T>
T gce_loss(std::span<const T> probs, std::size_t y, const GceConfig& cfg,
           std::span<T> grad_out) {
  detail::check_target<T>(probs.size(), y);
  if (cfg.q < 0.0 || cfg.q >= 1.0)
    throw config_error("gce q must lie in [0, 1)");
  const double py = double(probs[y]);
  double loss, scale;
  if (cfg.q == 0.0) {
    loss = -std::log(py);
    scale = 1.0;
  } else {
    const double pq = std::pow(py, cfg.q);
    loss = (1.0 - pq) / cfg.q;
    scale = pq;
  }
  for (std::size_t i = 0; i < probs.size(); ++i)
    grad_out[i] = T(scale * double(probs[i]));
  grad_out[y] -= T(scale);
  return T(loss);
}

template <class T>
LossResult<T> gce_loss(std::span<const T> probs, std::size_t y,
                       const GceConfig& cfg) {
  LossResult<T> r;
  r.grad.resize(probs.size());
  r.loss = gce_loss(probs, y, cfg, std::span<T>(r.grad));
  return r;
}

template <class T>
T lc_loss(std::span<const T> logits, std::size_t y, const CorrectionRow& row,
          std::span<T> grad_out, std::span<T> scratch) {
  detail::check_target<T>(logits.size(), y);
  if (row.offsets.size() != logits.size())
    throw config_error("correction row length mismatch");
  for (std::size_t i = 0; i < logits.size(); ++i)
    scratch[i] = logits[i] + T(row.offsets[i]);
  std::span<const T> corrected(scratch.data(), logits.size());
  softmax(corrected, grad_out);
  const T loss = log_sum_exp(corrected) - corrected[y];
  grad_out[y] -= T(1);
  return loss;
}

template <class T>
LossResult<T> lc_loss(std::span<const T> logits, std::size_t y,
                      const CorrectionRow& row) {
  LossResult<T> r;
  r.grad.resize(logits.size());
  std::vector<T> scratch(logits.size());
  r.loss = lc_loss(logits, y, row, std::span<T>(r.grad),
                   std::span<T>(scratch));
  return r;
}

// Pairwise-margin form of the corrected loss,
// ln(1 + Σ_{y'≠y} exp(f_{y'} − f_y + off_{y'} − off_y)). Used as an
// independent cross-check of lc_loss.
template <class T>
T lc_loss_pairwise(std::span<const T> logits, std::size_t y,
                   const CorrectionRow& row) {
  detail::check_target<T>(logits.size(), y);
  if (row.offsets.size() != logits.size())
    throw config_error("correction row length mismatch");
  const double base = double(logits[y]) + row.offsets[y];
  double peak = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (j == y) continue;
    peak = std::max(peak, double(logits[j]) + row.offsets[j] - base);
  }
  double sum = std::exp(-peak);
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (j == y) continue;
    sum += std::exp(double(logits[j]) + row.offsets[j] - base - peak);
  }
  return T(peak + std::log(sum));
}

template <class T>
T reweighted_ce_loss(std::span<const T> logits, std::size_t y, T weight,
                     std::span<T> grad_out) {
  if (!(weight > T(0)))
    throw config_error("reweighted ce needs a positive weight");
  const T loss = ce_loss(logits, y, grad_out);
  for (T& g : grad_out) g *= weight;
  return weight * loss;
}

template <class T>
LossResult<T> reweighted_ce_loss(std::span<const T> logits, std::size_t y,
                                 T weight) {
  LossResult<T> r;
  r.grad.resize(logits.size());
  r.loss = reweighted_ce_loss(logits, y, weight, std::span<T>(r.grad));
  return r;
}

} // namespace lc
