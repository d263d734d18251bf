#include "doctest.h"

#include "lc/datagen.hpp"
#include "lc/numerics.hpp"
#include "lc/trainer.hpp"

TEST_CASE("log_sum_exp basics") {
  const std::vector<double> v{0.0, 0.0};
  CHECK(lc::log_sum_exp(std::span<const double>(v)) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-12));
}

TEST_CASE("one epoch on a tiny toy runs end to end") {
  lc::GaussianToyOptions opts;
  opts.n_train = 512;
  opts.n_test = 128;
  const lc::BiasedDataset ds =
      lc::make_gaussian_toy(2, 2, 0.1, 1, 1, 2.0, 3, opts);
  lc::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 128;
  cfg.hidden = {16};
  const lc::TrainResult r = lc::train(ds, cfg);
  CHECK(r.records.size() == 1);
  CHECK(r.records.back().eval.gba >= 0.0);
  CHECK(r.records.back().eval.gba <= 1.0);
}
