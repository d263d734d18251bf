#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "lc/adam.hpp"
#include "lc/losses.hpp"
#include "lc/matmul.hpp"
#include "lc/mlp.hpp"
#include "lc/numerics.hpp"
#include "lc/rng.hpp"

namespace {

void naive_matmul(const std::vector<double>& a, const std::vector<double>& b,
                  std::vector<double>& c, std::size_t n, std::size_t k,
                  std::size_t m) {
  c.assign(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t p = 0; p < k; ++p)
        c[i * m + j] += a[i * k + p] * b[p * m + j];
}

} // namespace

TEST_CASE("matmul kernels agree with the naive triple loop") {
  lc::Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + rng.uniform_index(9);
    const std::size_t k = 1 + rng.uniform_index(17);
    const std::size_t m = 1 + rng.uniform_index(9);
    std::vector<double> a(n * k), b(k * m), bt(m * k), at(k * n);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < k; ++j) bt[i * k + j] = b[j * m + i];
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < n; ++j) at[i * n + j] = a[j * k + i];

    std::vector<double> want, got(n * m);
    naive_matmul(a, b, want, n, k, m);
    lc::detail::matmul_nn(a.data(), b.data(), got.data(), n, k, m);
    for (std::size_t i = 0; i < n * m; ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));

    lc::detail::matmul_nt(a.data(), bt.data(), got.data(), n, k, m);
    for (std::size_t i = 0; i < n * m; ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));

    // A^T (k x n) times A-free B: reuse naive on transposed operand.
    std::vector<double> want_tn;
    naive_matmul(at, b, want_tn, k, n, m);
    std::vector<double> got_tn(k * m);
    lc::detail::matmul_tn(a.data(), b.data(), got_tn.data(), n, k, m);
    for (std::size_t i = 0; i < k * m; ++i)
      CHECK(got_tn[i] == doctest::Approx(want_tn[i]).epsilon(1e-12));
  }
}

TEST_CASE("zero weights and biases give zero logits") {
  lc::Rng rng(3);
  lc::MlpF model({4, 3, 2}, rng);
  for (auto& w : model.weights) w.fill(0.0f);
  for (auto& b : model.biases) b.fill(0.0f);
  lc::TensorF x({2, 4}, {1, -2, 3, 4, 0.5f, 0, -1, 2});
  lc::MlpF::Cache cache;
  const lc::TensorF out = model.forward(x, cache);
  for (float v : out.data) CHECK(v == 0.0f);
}

TEST_CASE("single identity layer passes inputs through") {
  lc::Rng rng(3);
  lc::MlpF model({3, 3}, rng);
  model.weights[0].fill(0.0f);
  model.biases[0].fill(0.0f);
  for (std::size_t i = 0; i < 3; ++i) model.weights[0].at(i, i) = 1.0f;
  lc::TensorF x({1, 3}, {0.25f, -4.0f, 7.0f});
  lc::MlpF::Cache cache;
  const lc::TensorF out = model.forward(x, cache);
  for (std::size_t i = 0; i < 3; ++i) CHECK(out.data[i] == x.data[i]);
}

TEST_CASE("forward rejects a width mismatch, naming both sizes") {
  lc::Rng rng(4);
  lc::MlpF model({5, 2}, rng);
  lc::TensorF x({1, 3}, {1, 2, 3});
  lc::MlpF::Cache cache;
  CHECK_THROWS_WITH_AS(model.forward(x, cache), doctest::Contains("5"),
                       lc::config_error);
}

TEST_CASE("fixed-seed forward matches the stored golden file") {
  const std::string path = std::string(LC_TEST_DATA_DIR) +
                           "/mlp_forward_seed7.txt";
  std::ifstream in(path);
  REQUIRE_MESSAGE(bool(in), "missing golden file ", path);
  std::size_t n_layers, n, d, L;
  in >> n_layers >> n >> d >> L;
  std::vector<std::size_t> dims(n_layers);
  for (auto& v : dims) in >> v;
  lc::TensorF x = lc::TensorF::zeros({n, d});
  for (auto& v : x.data) in >> v;
  std::vector<float> want(n * L);
  for (auto& v : want) in >> v;

  lc::Rng rng(7);
  lc::MlpF model(dims, rng);
  lc::MlpF::Cache cache;
  const lc::TensorF got = model.forward(x, cache);
  REQUIRE(got.data.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i)
    CHECK(got.data[i] == doctest::Approx(want[i]).epsilon(1e-6));
}

TEST_CASE("backward without a cached forward is rejected") {
  lc::Rng rng(5);
  lc::MlpF model({3, 2}, rng);
  lc::MlpF::Cache cache;
  lc::TensorF up({1, 2}, {1, 0});
  CHECK_THROWS_AS(model.backward(cache, up), lc::config_error);
}

TEST_CASE("zero upstream gradient zeroes every parameter gradient") {
  lc::Rng rng(6);
  lc::MlpF model({4, 5, 3}, rng);
  lc::TensorF x = lc::TensorF::zeros({2, 4});
  for (auto& v : x.data) v = float(rng.normal());
  lc::MlpF::Cache cache;
  model.forward(x, cache);
  const lc::MlpF::Grads g =
      model.backward(cache, lc::TensorF::zeros({2, 3}));
  for (const auto& w : g.weights)
    for (float v : w.data) CHECK(v == 0.0f);
  for (const auto& b : g.biases)
    for (float v : b.data) CHECK(v == 0.0f);
}

TEST_CASE("batch gradient equals the sum of per-sample gradients") {
  lc::Rng rng(14);
  lc::MlpF model({3, 4, 2}, rng);
  lc::TensorF x = lc::TensorF::zeros({3, 3});
  lc::TensorF up = lc::TensorF::zeros({3, 2});
  for (auto& v : x.data) v = float(rng.normal());
  for (auto& v : up.data) v = float(rng.normal());

  lc::MlpF::Cache cache;
  model.forward(x, cache);
  const lc::MlpF::Grads whole = model.backward(cache, up);

  lc::MlpF::Grads acc;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    acc.weights.push_back(lc::TensorF::zeros(model.weights[l].shape));
    acc.biases.push_back(lc::TensorF::zeros(model.biases[l].shape));
  }
  for (std::size_t i = 0; i < 3; ++i) {
    lc::TensorF xi({1, 3}, {x.at(i, 0), x.at(i, 1), x.at(i, 2)});
    lc::TensorF ui({1, 2}, {up.at(i, 0), up.at(i, 1)});
    lc::MlpF::Cache c;
    model.forward(xi, c);
    const lc::MlpF::Grads gi = model.backward(c, ui);
    for (std::size_t l = 0; l < gi.weights.size(); ++l) {
      for (std::size_t j = 0; j < gi.weights[l].data.size(); ++j)
        acc.weights[l].data[j] += gi.weights[l].data[j];
      for (std::size_t j = 0; j < gi.biases[l].data.size(); ++j)
        acc.biases[l].data[j] += gi.biases[l].data[j];
    }
  }
  for (std::size_t l = 0; l < whole.weights.size(); ++l) {
    for (std::size_t j = 0; j < whole.weights[l].data.size(); ++j)
      CHECK(whole.weights[l].data[j] ==
            doctest::Approx(acc.weights[l].data[j]).epsilon(2e-4));
    for (std::size_t j = 0; j < whole.biases[l].data.size(); ++j)
      CHECK(whole.biases[l].data[j] ==
            doctest::Approx(acc.biases[l].data[j]).epsilon(2e-4));
  }
}

TEST_CASE("mlp backprop survives a central finite-difference audit") {
  // Double-precision twin of the float MLP keeps the FD noise floor low.
  lc::Rng rng(15);
  lc::Mlp<double> model({3, 4, 4, 2}, rng);
  lc::Tensor<double> x({1, 3}, {0.3, -0.9, 1.7});
  const std::size_t y = 1;

  std::vector<double*> params;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    for (auto& v : model.weights[l].data) params.push_back(&v);
    for (auto& v : model.biases[l].data) params.push_back(&v);
  }
  std::vector<double> point(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) point[i] = *params[i];

  auto risk = [&](const lc::TensorD& theta) {
    for (std::size_t i = 0; i < params.size(); ++i)
      *params[i] = theta.data[i];
    lc::Mlp<double>::Cache cache;
    const lc::Tensor<double> logits = model.forward(x, cache);
    return lc::ce_loss(std::span<const double>(logits.row(0)), y).loss;
  };

  lc::Mlp<double>::Cache cache;
  const lc::Tensor<double> logits = model.forward(x, cache);
  lc::LossResult<double> lr =
      lc::ce_loss(std::span<const double>(logits.row(0)), y);
  lc::Tensor<double> up({1, 2}, {lr.grad[0], lr.grad[1]});
  const lc::Mlp<double>::Grads g = model.backward(cache, up);

  std::vector<double> analytic;
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    analytic.insert(analytic.end(), g.weights[l].data.begin(),
                    g.weights[l].data.end());
    analytic.insert(analytic.end(), g.biases[l].data.begin(),
                    g.biases[l].data.end());
  }

  const lc::GradCheckReport rep = lc::finite_difference_check(
      risk, lc::TensorD({point.size()}, point),
      lc::TensorD({analytic.size()}, analytic), 1e-6);
  CHECK(rep.max_relative_error < 1e-4);
}

TEST_CASE("adam leaves parameters alone under a zero gradient") {
  lc::Rng rng(31);
  lc::MlpF model({2, 2}, rng);
  const std::vector<float> before = model.weights[0].data;
  auto params = model.params();
  lc::AdamState<float> state =
      lc::AdamState<float>::init(params, 1e-2);
  std::vector<lc::TensorF> zeros;
  for (const auto* p : params) zeros.push_back(lc::TensorF::zeros(p->shape));
  std::vector<const lc::TensorF*> grads;
  for (const auto& z : zeros) grads.push_back(&z);
  lc::adam_step(state, params, grads);
  CHECK(state.step_count == 1);
  CHECK(model.weights[0].data == before);
}

TEST_CASE("adam under a constant gradient approaches -lr per step") {
  lc::TensorF w({1, 1}, {0.0f});
  lc::TensorF g({1, 1}, {3.7f});
  std::vector<lc::TensorF*> params{&w};
  std::vector<const lc::TensorF*> grads{&g};
  lc::AdamState<float> state = lc::AdamState<float>::init(params, 0.01);
  float prev = 0.0f;
  for (int i = 0; i < 200; ++i) {
    prev = w.data[0];
    lc::adam_step(state, params, grads);
  }
  // Bias-corrected adam with a constant gradient moves -lr per step.
  CHECK(prev - w.data[0] == doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("schedule halves the learning rate after the listed iteration") {
  std::vector<lc::TensorF*> none;
  lc::AdamState<float> state =
      lc::AdamState<float>::init(none, 0.01, {{2, 0.5}});
  CHECK(state.effective_lr(1) == doctest::Approx(0.01));
  CHECK(state.effective_lr(2) == doctest::Approx(0.01));
  CHECK(state.effective_lr(3) == doctest::Approx(0.005));
}

TEST_CASE("checkpoints round-trip bit for bit") {
  lc::Rng rng(77);
  lc::MlpF model({6, 5, 4}, rng);
  const std::string path = "/tmp/lc_test_ckpt.lcmlp";
  lc::save_checkpoint(model, path);
  const lc::MlpF back = lc::load_checkpoint(path);
  REQUIRE(back.dims == model.dims);
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    CHECK(back.weights[l].data == model.weights[l].data);
    CHECK(back.biases[l].data == model.biases[l].data);
  }
  std::filesystem::remove(path);
}

TEST_CASE("corrupt checkpoints are rejected") {
  const std::string path = "/tmp/lc_test_ckpt_bad.lcmlp";
  {
    std::ofstream out(path, std::ios::binary);
    out << "LCMLPX junk";
  }
  CHECK_THROWS_AS(lc::load_checkpoint(path), lc::io_error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(lc::load_checkpoint("/tmp/definitely_missing.lcmlp"),
                  lc::io_error);
}
