#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "lc/errors.hpp"
#include "lc/tensor.hpp"

namespace lc {

// Step decay: entry (it, f) multiplies the learning rate by f for every
// update whose 1-based index exceeds it.
using LrSchedule = std::vector<std::pair<std::size_t, double>>;

template <class T>
struct AdamState {
  std::size_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double learning_rate = 1e-3;
  LrSchedule decay_schedule;
  std::vector<Tensor<T>> first_moment;
  std::vector<Tensor<T>> second_moment;

  template <class PtrVec>
  static AdamState init(const PtrVec& params, double lr,
                        LrSchedule schedule = {}) {
    AdamState st;
    st.learning_rate = lr;
    st.decay_schedule = std::move(schedule);
    for (const auto* p : params) {
      st.first_moment.push_back(Tensor<T>::zeros(p->shape));
      st.second_moment.push_back(Tensor<T>::zeros(p->shape));
    }
    return st;
  }

  double effective_lr(std::size_t update_index) const {
    double lr = learning_rate;
    for (const auto& [it, factor] : decay_schedule)
      if (update_index > it) lr *= factor;
    return lr;
  }
};

template <class T>
void adam_step(AdamState<T>& state, const std::vector<Tensor<T>*>& params,
               const std::vector<const Tensor<T>*>& grads) {
  if (params.size() != grads.size() ||
      params.size() != state.first_moment.size())
    throw config_error("adam_step parameter/gradient count mismatch");
  state.step_count += 1;
  const double t = double(state.step_count);
  const double lr = state.effective_lr(state.step_count);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor<T>& p = *params[k];
    const Tensor<T>& g = *grads[k];
    Tensor<T>& m = state.first_moment[k];
    Tensor<T>& v = state.second_moment[k];
    if (p.shape != g.shape || p.shape != m.shape)
      throw config_error("adam_step shape mismatch at parameter " +
                         std::to_string(k));
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      const double gi = double(g.data[i]);
      const double mi = state.beta1 * double(m.data[i]) +
                        (1.0 - state.beta1) * gi;
      const double vi = state.beta2 * double(v.data[i]) +
                        (1.0 - state.beta2) * gi * gi;
      m.data[i] = T(mi);
      v.data[i] = T(vi);
      const double mhat = mi / bc1;
      const double vhat = vi / bc2;
      p.data[i] = T(double(p.data[i]) -
                    lr * mhat / (std::sqrt(vhat) + state.epsilon));
    }
  }
}

} // namespace lc
