#include "lc/prior.hpp"

#include "lc/numerics.hpp"

namespace lc {

std::string to_string(PriorStrategy s) {
  switch (s) {
    case PriorStrategy::DatasetAvg: return "dataset-avg";
    case PriorStrategy::BatchAvg: return "batch-avg";
    case PriorStrategy::MovingAvg: return "moving-avg";
  }
  throw config_error("unknown prior strategy");
}

PriorStrategy prior_strategy_from_string(const std::string& name) {
  if (name == "dataset-avg") return PriorStrategy::DatasetAvg;
  if (name == "batch-avg") return PriorStrategy::BatchAvg;
  if (name == "moving-avg") return PriorStrategy::MovingAvg;
  throw config_error("unknown prior strategy: " + name);
}

bool GroupPrior::update(const TensorD& posteriors,
                        std::span<const std::size_t> labels) {
  if (posteriors.shape.size() != 2 || posteriors.cols() != K())
    throw config_error("prior update expects n x K attribute posteriors");
  const std::size_t n = posteriors.rows();
  if (n == 0) {
    ++empty_batch_warnings;
    return false;
  }
  if (labels.size() != n)
    throw config_error("prior update label count mismatch");
  for (std::size_t y : labels)
    if (y >= L()) throw config_error("prior update label out of range");

  if (per_sample_ema && strategy == PriorStrategy::MovingAvg) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::span<const double> row = posteriors.row(i);
      const std::size_t a = argmax_smallest(row);
      double& cell = table.at(labels[i], a);
      cell = alpha * cell + (1.0 - alpha) * row[a];
    }
    return true;
  }

  TensorD mean = TensorD::zeros({L(), K()});
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> row = posteriors.row(i);
    double* dst = mean.data.data() + labels[i] * K();
    for (std::size_t a = 0; a < K(); ++a) dst[a] += row[a];
  }

  switch (strategy) {
    case PriorStrategy::BatchAvg:
      for (std::size_t i = 0; i < table.data.size(); ++i)
        table.data[i] = mean.data[i] / double(n);
      break;
    case PriorStrategy::MovingAvg:
      for (std::size_t i = 0; i < table.data.size(); ++i)
        table.data[i] =
            alpha * table.data[i] + (1.0 - alpha) * mean.data[i] / double(n);
      break;
    case PriorStrategy::DatasetAvg:
      for (std::size_t i = 0; i < epoch_accum.data.size(); ++i)
        epoch_accum.data[i] += mean.data[i];
      epoch_samples += n;
      break;
  }
  return true;
}

void GroupPrior::end_epoch() {
  if (strategy == PriorStrategy::DatasetAvg && epoch_samples > 0) {
    for (std::size_t i = 0; i < table.data.size(); ++i)
      table.data[i] = epoch_accum.data[i] / double(epoch_samples);
  }
  epoch_accum.fill(0.0);
  epoch_samples = 0;
}

} // namespace lc
