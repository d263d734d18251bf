#include "lc/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "lc/losses.hpp"
#include "lc/metrics.hpp"
#include "lc/mixup.hpp"
#include "lc/numerics.hpp"
#include "lc/posterior.hpp"
#include "lc/rng.hpp"

namespace lc {

std::string to_string(LossMode m) {
  switch (m) {
    case LossMode::LC: return "lc";
    case LossMode::CE: return "ce";
    case LossMode::ReweightedCE: return "rwce";
  }
  throw config_error("unknown loss mode");
}

LossMode loss_mode_from_string(const std::string& name) {
  if (name == "lc") return LossMode::LC;
  if (name == "ce") return LossMode::CE;
  if (name == "rwce") return LossMode::ReweightedCE;
  throw config_error("unknown loss mode: " + name);
}

void TrainConfig::validate() const {
  if (epochs == 0) throw config_error("epochs must be >= 1");
  if (batch_size == 0) throw config_error("batch size must be >= 1");
  if (q < 0.0 || q >= 1.0) throw config_error("q must lie in [0, 1)");
  if (!(learning_rate > 0.0))
    throw config_error("learning rate must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw config_error("alpha must lie in (0, 1)");
  if (rampup_epochs == 0) throw config_error("rampup epochs must be >= 1");
  if (!(floor_epsilon > 0.0))
    throw config_error("floor epsilon must be positive");
  if (eval_batch == 0) throw config_error("eval batch must be >= 1");
  if (margin_stride == 0) throw config_error("margin stride must be >= 1");
  for (std::size_t h : hidden)
    if (h == 0) throw config_error("hidden widths must be positive");
}

namespace {

void gather_rows(const TensorF& src, std::span<const std::size_t> idx,
                 TensorF& dst) {
  const std::size_t d = src.cols();
  dst.shape = {idx.size(), d};
  dst.data.resize(idx.size() * d);
  for (std::size_t i = 0; i < idx.size(); ++i)
    std::copy_n(src.data.data() + idx[i] * d, d, dst.data.data() + i * d);
}

struct BranchState {
  MlpF model;
  AdamState<float> adam;

  BranchState(std::vector<std::size_t> dims, Rng& init_rng, double lr,
              const LrSchedule& schedule)
      : model(std::move(dims), init_rng),
        adam(AdamState<float>::init(model.params(), lr, schedule)) {}

  void step(const MlpF::Cache& cache, const TensorF& dlogits) {
    const MlpF::Grads grads = model.backward(cache, dlogits);
    std::vector<const TensorF*> gptrs;
    for (std::size_t l = 0; l < grads.weights.size(); ++l) {
      gptrs.push_back(&grads.weights[l]);
      gptrs.push_back(&grads.biases[l]);
    }
    auto pptrs = model.params();
    adam_step(adam, pptrs, gptrs);
  }
};

// Mean margins on the train split; the minority side comes from the ERM
// branch's current predictions, not ground-truth attributes.
MarginDiag train_margins(const MlpF& robust, const MlpF& erm,
                         const BiasedDataset& ds,
                         std::span<const std::size_t> train_idx,
                         std::size_t eval_batch, bool* sides_present) {
  std::vector<double> margins;
  std::vector<std::uint8_t> majority;
  margins.reserve(train_idx.size());
  majority.reserve(train_idx.size());
  TensorF batch;
  for (std::size_t start = 0; start < train_idx.size();
       start += eval_batch) {
    const std::size_t stop =
        std::min(train_idx.size(), start + eval_batch);
    gather_rows(ds.features, train_idx.subspan(start, stop - start), batch);
    const TensorF rl = robust.forward(batch);
    const TensorF el = erm.forward(batch);
    const std::size_t L = rl.cols();
    for (std::size_t i = 0; i < rl.rows(); ++i) {
      const std::size_t y = ds.labels[train_idx[start + i]];
      margins.push_back(example_margin(rl.row(i), y));
      majority.push_back(
          argmax_smallest(el.row(i)) == y ? std::uint8_t(1) : std::uint8_t(0));
    }
  }
  MarginDiag d;
  bool has_maj = false, has_min = false;
  for (std::uint8_t m : majority) (m ? has_maj : has_min) = true;
  if (!has_maj || !has_min) {
    if (sides_present) *sides_present = false;
    return d;
  }
  const MarginSummary s = group_margins(
      margins, std::vector<std::size_t>(margins.size(), 0), majority);
  d.majority_mean = s.majority_mean;
  d.minority_mean = s.minority_mean;
  d.ratio = s.ratio;
  d.majority_min = s.majority_min;
  d.minority_min = s.minority_min;
  return d;
}

} // namespace

EvalResult evaluate(const MlpF& model, const BiasedDataset& ds,
                    std::size_t eval_batch) {
  const auto test_idx = ds.test_indices();
  if (test_idx.empty()) throw config_error("dataset has no test split");
  std::map<std::size_t, std::size_t> correct, total;
  TensorF batch;
  std::size_t overall_correct = 0;
  for (std::size_t start = 0; start < test_idx.size(); start += eval_batch) {
    const std::size_t stop = std::min(test_idx.size(), start + eval_batch);
    gather_rows(ds.features,
                std::span<const std::size_t>(test_idx).subspan(
                    start, stop - start),
                batch);
    const TensorF logits = model.forward(batch);
    for (std::size_t i = 0; i < logits.rows(); ++i) {
      const std::size_t gidx = test_idx[start + i];
      const std::size_t g = ds.group_id(gidx);
      const bool hit =
          argmax_smallest(logits.row(i)) == std::size_t(ds.labels[gidx]);
      total[g] += 1;
      if (hit) {
        correct[g] += 1;
        ++overall_correct;
      }
    }
  }
  EvalResult r;
  for (const auto& [g, n] : total) {
    r.group_accuracy[g] = double(correct[g]) / double(n);
    r.group_total[g] = n;
  }
  for (std::size_t y = 0; y < ds.L; ++y)
    for (std::size_t a = 0; a < ds.K; ++a)
      if (!total.count(y * ds.K + a))
        r.warnings.push_back("group (" + std::to_string(y) + "," +
                             std::to_string(a) +
                             ") has no test samples; excluded from gba");
  r.gba = gba(r.group_accuracy);
  r.worst = worst_group(r.group_accuracy);
  r.overall = double(overall_correct) / double(test_idx.size());
  return r;
}

TrainResult train(const BiasedDataset& ds, const TrainConfig& cfg,
                  const TrainHooks* hooks) {
  cfg.validate();
  ds.validate();
  if (ds.topology.L != ds.L || ds.topology.K != ds.K)
    throw config_error("dataset topology dims disagree with dataset");
  const std::vector<std::size_t> train_idx = ds.train_indices();
  if (train_idx.empty()) throw config_error("dataset has no train split");
  const std::size_t L = ds.L;
  const CorrelationTopology topo = cfg.assume_one_to_one
                                       ? CorrelationTopology::one_to_one(L)
                                       : ds.topology;
  const std::size_t K = topo.K;

  std::vector<std::size_t> dims;
  dims.push_back(ds.d);
  for (std::size_t h : cfg.hidden) dims.push_back(h);
  dims.push_back(L);

  Rng root(cfg.seed);
  Rng erm_init = root.fork(1);
  Rng robust_init = root.fork(2);
  Rng order_rng = root.fork(3);
  Rng mix_rng = root.fork(4);

  BranchState erm(dims, erm_init, cfg.learning_rate, cfg.lr_decay);
  BranchState robust(dims, robust_init, cfg.learning_rate, cfg.lr_decay);

  GroupPrior prior = GroupPrior::uniform(L, K, cfg.strategy, cfg.alpha);
  prior.per_sample_ema = cfg.per_sample_ema;
  AttributeSplitter splitter(topo);
  const bool needs_split = [&] {
    for (const auto& attrs : topo.group_to_attrs)
      if (attrs.size() > 1) return true;
    return false;
  }();

  TrainResult out;
  std::vector<std::size_t> order(train_idx);
  TensorF batch_x, robust_x;
  std::vector<std::size_t> batch_y;
  std::vector<std::size_t> batch_attr;
  std::vector<std::uint8_t> batch_minority;
  const GceConfig gce_cfg{cfg.q};

  std::size_t iteration = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    double erm_loss_sum = 0.0, robust_loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      ++iteration;
      const std::size_t stop =
          std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> idx =
          std::span<const std::size_t>(order).subspan(start, stop - start);
      const std::size_t n = idx.size();
      gather_rows(ds.features, idx, batch_x);
      batch_y.resize(n);
      for (std::size_t i = 0; i < n; ++i) batch_y[i] = ds.labels[idx[i]];

      try {
        // ERM branch: GCE on the original samples.
        if (hooks && hooks->on_erm_batch)
          hooks->on_erm_batch(epoch, idx, batch_x);
        MlpF::Cache erm_cache;
        const TensorF erm_logits = erm.model.forward(batch_x, erm_cache);
        TensorF dlogits = TensorF::zeros({n, L});
        std::vector<float> probs(L);
        double batch_erm_loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          softmax(erm_logits.row(i), std::span<float>(probs));
          batch_erm_loss += double(gce_loss(
              std::span<const float>(probs), batch_y[i], gce_cfg,
              std::span<float>(dlogits.data.data() + i * L, L)));
        }
        const float inv_n = 1.0f / float(n);
        for (float& g : dlogits.data) g *= inv_n;
        erm.step(erm_cache, dlogits);
        erm_loss_sum += batch_erm_loss;

        // Fresh probabilities from the just-updated ERM branch.
        const TensorF fresh = erm.model.forward(batch_x);
        TensorD posteriors = TensorD::zeros({n, K});
        batch_attr.resize(n);
        batch_minority.resize(n);
        std::vector<double> dprobs(L);
        if (needs_split) {
          for (std::size_t i = 0; i < n; ++i) {
            softmax_double(fresh.row(i), std::span<double>(dprobs));
            splitter.observe(topo.group_of_label(batch_y[i]), dprobs);
          }
        }
        for (std::size_t i = 0; i < n; ++i) {
          softmax_double(fresh.row(i), std::span<double>(dprobs));
          attribute_posterior(dprobs, topo,
                              needs_split ? &splitter : nullptr,
                              posteriors.row(i));
          batch_attr[i] = argmax_smallest(
              std::span<const double>(posteriors.row(i)));
          batch_minority[i] =
              is_minority(std::span<const float>(fresh.row(i)), batch_y[i])
                  ? 1
                  : 0;
        }
        if (!cfg.freeze_prior_uniform)
          prior.update(posteriors, batch_y);

        // Robust branch input and per-sample correction sources.
        const double tau = mixup_ramp(epoch, cfg.rampup_epochs);
        TensorD prob_rows;
        const TensorF* rx = &batch_x;
        if (cfg.mixup_enabled) {
          MixupResult mr = group_mixup(batch_x, batch_y, batch_attr,
                                       batch_minority, prior, tau, mix_rng,
                                       cfg.static_lambda);
          robust_x = std::move(mr.mixed);
          prob_rows = std::move(mr.prob_rows);
          rx = &robust_x;
        } else if (cfg.loss_mode == LossMode::LC) {
          prob_rows = TensorD::zeros({n, L});
          for (std::size_t i = 0; i < n; ++i) {
            double* row = prob_rows.data.data() + i * L;
            for (std::size_t c = 0; c < L; ++c)
              row[c] = prior.at(c, batch_attr[i]);
          }
        }

        if (hooks && hooks->on_robust_batch)
          hooks->on_robust_batch(epoch, idx, *rx);

        MlpF::Cache robust_cache;
        const TensorF robust_logits = robust.model.forward(*rx, robust_cache);
        dlogits.fill(0.0f);
        double batch_robust_loss = 0.0;
        std::vector<float> scratch(L);
        if (cfg.loss_mode == LossMode::ReweightedCE) {
          std::vector<float> weights(n);
          double wsum = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const double p = std::max(prior.at(batch_y[i], batch_attr[i]),
                                      cfg.floor_epsilon);
            weights[i] = float(1.0 / p);
            wsum += 1.0 / p;
          }
          const float norm = float(double(n) / wsum);
          for (std::size_t i = 0; i < n; ++i) {
            batch_robust_loss += double(reweighted_ce_loss(
                std::span<const float>(robust_logits.row(i)), batch_y[i],
                weights[i] * norm,
                std::span<float>(dlogits.data.data() + i * L, L)));
          }
        } else if (cfg.loss_mode == LossMode::CE) {
          for (std::size_t i = 0; i < n; ++i)
            batch_robust_loss += double(ce_loss(
                std::span<const float>(robust_logits.row(i)), batch_y[i],
                std::span<float>(dlogits.data.data() + i * L, L)));
        } else {
          std::vector<double> prow(L);
          for (std::size_t i = 0; i < n; ++i) {
            std::copy_n(prob_rows.data.data() + i * L, L, prow.begin());
            const CorrectionRow row =
                CorrectionRow::from_probs(prow, cfg.floor_epsilon);
            batch_robust_loss += double(lc_loss(
                std::span<const float>(robust_logits.row(i)), batch_y[i],
                row, std::span<float>(dlogits.data.data() + i * L, L),
                std::span<float>(scratch)));
          }
        }
        if (!std::isfinite(batch_robust_loss))
          throw numeric_error("non-finite robust loss");
        for (float& g : dlogits.data) g *= inv_n;
        robust.step(robust_cache, dlogits);
        robust_loss_sum += batch_robust_loss;
        seen += n;
      } catch (const numeric_error& e) {
        throw numeric_error(std::string(e.what()) + " at iteration " +
                            std::to_string(iteration));
      }
    }
    prior.end_epoch();

    EpochRecord rec;
    rec.epoch = epoch;
    rec.erm_loss = erm_loss_sum / double(seen);
    rec.robust_loss = robust_loss_sum / double(seen);
    rec.eval = evaluate(robust.model, ds, cfg.eval_batch);
    if ((epoch + 1) % cfg.margin_stride == 0 || epoch + 1 == cfg.epochs)
      rec.margins = train_margins(robust.model, erm.model, ds, train_idx,
                                  cfg.eval_batch, &out.margin_sides_present);
    out.records.push_back(std::move(rec));
  }

  out.robust = std::move(robust.model);
  out.erm = std::move(erm.model);
  out.prior = std::move(prior);
  out.iterations = iteration;
  return out;
}

} // namespace lc
