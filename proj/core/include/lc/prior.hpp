#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lc/errors.hpp"
#include "lc/tensor.hpp"
#include "lc/topology.hpp"

namespace lc {

enum class PriorStrategy : int {
  DatasetAvg = 0,
  BatchAvg = 1,
  MovingAvg = 2,
};

std::string to_string(PriorStrategy s);
PriorStrategy prior_strategy_from_string(const std::string& name);

// Estimated joint P̂(y, a) over labels and attribute values.
struct GroupPrior {
  TensorD table; // L x K
  PriorStrategy strategy = PriorStrategy::MovingAvg;
  double alpha = 0.5;
  // Updates only entry (y, a_x) with the posterior mass at a_x, as a
  // per-sample EMA. Does not preserve normalization; off by default.
  bool per_sample_ema = false;
  std::size_t empty_batch_warnings = 0;

  TensorD epoch_accum;
  std::size_t epoch_samples = 0;

  static GroupPrior uniform(std::size_t L, std::size_t K,
                            PriorStrategy strategy = PriorStrategy::MovingAvg,
                            double alpha = 0.5) {
    if (L == 0 || K == 0) throw config_error("prior needs L, K >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
      throw config_error("prior momentum must lie in (0, 1)");
    GroupPrior p;
    p.table = TensorD::full({L, K}, 1.0 / double(L * K));
    p.strategy = strategy;
    p.alpha = alpha;
    p.epoch_accum = TensorD::zeros({L, K});
    return p;
  }

  std::size_t L() const { return table.rows(); }
  std::size_t K() const { return table.cols(); }

  double at(std::size_t y, std::size_t a) const { return table.at(y, a); }

  // Column a as class probabilities P̂(c, a), c = 0..L-1.
  std::vector<double> column(std::size_t a) const {
    if (a >= K()) throw config_error("prior column out of range");
    std::vector<double> col(L());
    for (std::size_t y = 0; y < L(); ++y) col[y] = table.at(y, a);
    return col;
  }

  // posteriors: n x K attribute posteriors, one row per sample. Returns
  // false (and counts a warning) on an empty batch.
  bool update(const TensorD& posteriors, std::span<const std::size_t> labels);

  // DatasetAvg swaps in the accumulated epoch mean; other strategies reset
  // the accumulator only.
  void end_epoch();
};

} // namespace lc
