#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lc/errors.hpp"
#include "lc/matmul.hpp"
#include "lc/rng.hpp"
#include "lc/tensor.hpp"

namespace lc {

// Fully connected rectifier net. Weights are stored [in, out] so a forward
// pass is one row-major matmul per layer. Rows of a batch never interact.
template <class T>
struct Mlp {
  std::vector<std::size_t> dims; // [d_in, hidden..., n_out]
  std::vector<Tensor<T>> weights;
  std::vector<Tensor<T>> biases;

  struct Cache {
    bool valid = false;
    Tensor<T> input;
    std::vector<Tensor<T>> pre; // pre-activation per layer
    std::vector<Tensor<T>> act; // post-ReLU per hidden layer
  };

  struct Grads {
    std::vector<Tensor<T>> weights;
    std::vector<Tensor<T>> biases;
    Tensor<T> input;
  };

  Mlp() = default;

  Mlp(std::vector<std::size_t> layer_dims, Rng& rng)
      : dims(std::move(layer_dims)) {
    if (dims.size() < 2)
      throw config_error("mlp needs at least input and output dims");
    for (std::size_t d : dims)
      if (d == 0) throw config_error("mlp layer dim must be positive");
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      const std::size_t fan_in = dims[l];
      const std::size_t fan_out = dims[l + 1];
      const T wb = static_cast<T>(std::sqrt(6.0 / double(fan_in)));
      const T bb = static_cast<T>(1.0 / std::sqrt(double(fan_in)));
      Tensor<T> w = Tensor<T>::zeros({fan_in, fan_out});
      for (T& v : w.data) v = static_cast<T>(rng.uniform(-wb, wb));
      Tensor<T> b = Tensor<T>::zeros({fan_out});
      for (T& v : b.data) v = static_cast<T>(rng.uniform(-bb, bb));
      weights.push_back(std::move(w));
      biases.push_back(std::move(b));
    }
  }

  static Mlp zeros_like(std::vector<std::size_t> layer_dims) {
    Rng rng(0);
    Mlp m(std::move(layer_dims), rng);
    for (auto& w : m.weights) w.fill(T(0));
    for (auto& b : m.biases) b.fill(T(0));
    return m;
  }

  std::size_t num_layers() const { return weights.size(); }
  std::size_t in_dim() const { return dims.front(); }
  std::size_t out_dim() const { return dims.back(); }

  std::size_t num_params() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
      n += weights[l].numel() + biases[l].numel();
    return n;
  }

  std::vector<Tensor<T>*> params() {
    std::vector<Tensor<T>*> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      out.push_back(&weights[l]);
      out.push_back(&biases[l]);
    }
    return out;
  }

  std::vector<const Tensor<T>*> params() const {
    std::vector<const Tensor<T>*> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      out.push_back(&weights[l]);
      out.push_back(&biases[l]);
    }
    return out;
  }

  Tensor<T> forward(const Tensor<T>& batch, Cache& cache) const {
    if (batch.shape.size() != 2)
      throw config_error("mlp forward expects a 2-d batch");
    if (batch.cols() != in_dim())
      throw config_error("mlp input dim mismatch: expected " +
                         std::to_string(in_dim()) + ", got " +
                         std::to_string(batch.cols()));
    const std::size_t n = batch.rows();
    cache.valid = false;
    cache.input = batch;
    cache.pre.clear();
    cache.act.clear();
    const Tensor<T>* cur = &cache.input;
    for (std::size_t l = 0; l < num_layers(); ++l) {
      const std::size_t in = dims[l];
      const std::size_t out = dims[l + 1];
      Tensor<T> z = Tensor<T>::zeros({n, out});
      detail::matmul_nn(cur->data.data(), weights[l].data.data(),
                        z.data.data(), n, in, out);
      for (std::size_t i = 0; i < n; ++i) {
        T* zrow = z.data.data() + i * out;
        const T* b = biases[l].data.data();
        for (std::size_t j = 0; j < out; ++j) zrow[j] += b[j];
      }
      cache.pre.push_back(std::move(z));
      if (l + 1 < num_layers()) {
        Tensor<T> a = cache.pre.back();
        for (T& v : a.data) v = v > T(0) ? v : T(0);
        cache.act.push_back(std::move(a));
        cur = &cache.act.back();
      }
    }
    cache.valid = true;
    Tensor<T> logits = cache.pre.back();
    ensure_finite(logits, "mlp logits");
    return logits;
  }

  Tensor<T> forward(const Tensor<T>& batch) const {
    Cache cache;
    return forward(batch, cache);
  }

  Grads backward(const Cache& cache, const Tensor<T>& upstream) const {
    if (!cache.valid)
      throw config_error("mlp backward called without a cached forward");
    const std::size_t n = cache.input.rows();
    if (upstream.rows() != n || upstream.cols() != out_dim())
      throw config_error("mlp upstream grad shape mismatch");
    Grads g;
    g.weights.resize(num_layers());
    g.biases.resize(num_layers());
    Tensor<T> delta = upstream;
    for (std::size_t li = num_layers(); li-- > 0;) {
      const std::size_t in = dims[li];
      const std::size_t out = dims[li + 1];
      const Tensor<T>& layer_in = li == 0 ? cache.input : cache.act[li - 1];
      Tensor<T> dw = Tensor<T>::zeros({in, out});
      detail::matmul_tn(layer_in.data.data(), delta.data.data(),
                        dw.data.data(), n, in, out);
      Tensor<T> db = Tensor<T>::zeros({out});
      for (std::size_t i = 0; i < n; ++i) {
        const T* drow = delta.data.data() + i * out;
        for (std::size_t j = 0; j < out; ++j) db.data[j] += drow[j];
      }
      g.weights[li] = std::move(dw);
      g.biases[li] = std::move(db);
      Tensor<T> dprev = Tensor<T>::zeros({n, in});
      detail::matmul_nt(delta.data.data(), weights[li].data.data(),
                        dprev.data.data(), n, out, in);
      if (li > 0) {
        const Tensor<T>& pre = cache.pre[li - 1];
        for (std::size_t i = 0; i < dprev.data.size(); ++i)
          if (!(pre.data[i] > T(0))) dprev.data[i] = T(0);
      }
      delta = std::move(dprev);
    }
    g.input = std::move(delta);
    return g;
  }
};

using MlpF = Mlp<float>;
using MlpD = Mlp<double>;

// Binary checkpoint: "LCMLP1", int32 layer count, then per layer
// [int32 in, int32 out, float32 weights row-major, float32 biases].
// All integers and floats little-endian. Round-trips bit-exactly.
void save_checkpoint(const MlpF& model, const std::string& path);
MlpF load_checkpoint(const std::string& path);

} // namespace lc
