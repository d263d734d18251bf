#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lc/adam.hpp"
#include "lc/dataset.hpp"
#include "lc/mlp.hpp"
#include "lc/prior.hpp"
#include "lc/tensor.hpp"

namespace lc {

enum class LossMode : int { LC = 0, CE = 1, ReweightedCE = 2 };

std::string to_string(LossMode m);
LossMode loss_mode_from_string(const std::string& name);

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 256;
  double q = 0.7;
  double learning_rate = 1e-2;
  LrSchedule lr_decay = {{10000, 0.5}};
  double alpha = 0.5;
  std::size_t rampup_epochs = 2;
  PriorStrategy strategy = PriorStrategy::MovingAvg;
  bool per_sample_ema = false;
  bool mixup_enabled = false;
  bool static_lambda = false;
  LossMode loss_mode = LossMode::LC;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden = {100, 100, 100};
  // Keeps the prior at uniform for the whole run (no updates applied).
  bool freeze_prior_uniform = false;
  // Runs the prior/posterior machinery against a one-to-one label<->attribute
  // map of size L instead of the dataset's real topology. Evaluation still
  // scores the real groups, so this measures what ignoring the group
  // structure costs.
  bool assume_one_to_one = false;
  double floor_epsilon = 1e-8;
  std::size_t eval_batch = 512;
  // Margin diagnostics sweep the whole train split twice, which is a big
  // share of an epoch; compute them every Nth epoch (the last one always
  // runs). Skipped epochs report zeroed margins.
  std::size_t margin_stride = 1;

  void validate() const;
};

struct EvalResult {
  std::map<std::size_t, double> group_accuracy; // flat id y*K + a
  std::map<std::size_t, std::size_t> group_total;
  double gba = 0.0;
  double worst = 0.0;
  double overall = 0.0;
  std::vector<std::string> warnings;
};

struct MarginDiag {
  double majority_mean = 0.0;
  double minority_mean = 0.0;
  double ratio = 0.0;
  double majority_min = 0.0;
  double minority_min = 0.0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double erm_loss = 0.0;
  double robust_loss = 0.0;
  EvalResult eval;
  MarginDiag margins; // train split, minority via the ERM branch
};

struct TrainHooks {
  std::function<void(std::size_t epoch, std::span<const std::size_t> indices,
                     const TensorF& inputs)>
      on_erm_batch;
  std::function<void(std::size_t epoch, std::span<const std::size_t> indices,
                     const TensorF& inputs)>
      on_robust_batch;
};

struct TrainResult {
  MlpF robust;
  MlpF erm;
  std::vector<EpochRecord> records;
  GroupPrior prior;
  std::size_t iterations = 0;
  bool margin_sides_present = true;

  const EpochRecord& final_record() const {
    if (records.empty()) throw config_error("no epochs were trained");
    return records.back();
  }
  double best_gba() const {
    double best = 0.0;
    for (const auto& r : records) best = std::max(best, r.eval.gba);
    return best;
  }
};

// Per batch: GCE step on the ERM branch over original inputs, fresh ERM
// probabilities, prior update, optional group mixup, then the robust step
// under the configured loss.
TrainResult train(const BiasedDataset& ds, const TrainConfig& cfg,
                  const TrainHooks* hooks = nullptr);

// Raw-argmax accuracy per (y, a) cell of the test split; groups with no
// test samples are excluded and reported in warnings.
EvalResult evaluate(const MlpF& model, const BiasedDataset& ds,
                    std::size_t eval_batch = 512);

} // namespace lc
