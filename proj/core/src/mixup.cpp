#include "lc/mixup.hpp"

#include <algorithm>
#include <cmath>

#include "lc/errors.hpp"

namespace lc {

double mixup_ramp(std::size_t epoch, std::size_t rampup_epochs) {
  if (rampup_epochs == 0) throw config_error("rampup epochs must be >= 1");
  const double frac =
      std::min(double(epoch) / double(rampup_epochs), 1.0);
  const double gap = 1.0 - frac;
  return 0.5 * std::exp(-5.0 * gap * gap);
}

MixupResult group_mixup(const TensorF& inputs,
                        std::span<const std::size_t> labels,
                        std::span<const std::size_t> attrs,
                        std::span<const std::uint8_t> minority_flags,
                        const GroupPrior& prior, double tau, Rng& rng,
                        bool static_lambda) {
  const std::size_t n = inputs.rows();
  const std::size_t d = inputs.cols();
  const std::size_t L = prior.L();
  if (labels.size() != n || attrs.size() != n || minority_flags.size() != n)
    throw config_error("group_mixup batch size mismatch");
  if (!(tau >= 0.0 && tau <= 0.5))
    throw config_error("group_mixup tau must lie in [0, 0.5]");
  for (std::size_t a : attrs)
    if (a >= prior.K()) throw config_error("group_mixup attribute out of range");

  MixupResult out;
  out.mixed = inputs;
  out.prob_rows = TensorD::zeros({n, L});

  std::vector<std::vector<std::size_t>> pool(L);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= L) throw config_error("group_mixup label out of range");
    if (minority_flags[i]) pool[labels[i]].push_back(i);
  }
  bool any = false;
  for (const auto& p : pool) any = any || !p.empty();

  double lambda = 1.0;
  if (any) {
    lambda = static_lambda ? rng.uniform(0.5, 1.0)
                           : rng.uniform(1.0 - 2.0 * tau, 1.0 - tau);
  }
  out.lambda = lambda;

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t y = labels[i];
    double* row = out.prob_rows.data.data() + i * L;
    if (!any || pool[y].empty()) {
      for (std::size_t c = 0; c < L; ++c) row[c] = prior.at(c, attrs[i]);
      continue;
    }
    const std::size_t j = pool[y][rng.uniform_index(pool[y].size())];
    const float lam = float(lambda);
    float* xi = out.mixed.data.data() + i * d;
    const float* xj = inputs.data.data() + j * d;
    for (std::size_t k = 0; k < d; ++k)
      xi[k] = lam * xi[k] + (1.0f - lam) * xj[k];
    for (std::size_t c = 0; c < L; ++c)
      row[c] = lambda * prior.at(c, attrs[i]) +
               (1.0 - lambda) * prior.at(c, attrs[j]);
    ++out.num_mixed;
  }
  return out;
}

} // namespace lc
