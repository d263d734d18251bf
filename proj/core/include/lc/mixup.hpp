#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lc/prior.hpp"
#include "lc/rng.hpp"
#include "lc/tensor.hpp"

namespace lc {

struct MixupConfig {
  bool enabled = false;
  std::size_t rampup_epochs = 2;
  // Draws lambda from the fixed U(0.5, 1) range instead of U(1-2tau, 1-tau).
  bool static_lambda = false;
};

// tau = 0.5 * exp(-5 * (1 - min(epoch/T, 1))^2)
double mixup_ramp(std::size_t epoch, std::size_t rampup_epochs);

struct MixupResult {
  TensorF mixed;       // n x d inputs after blending
  TensorD prob_rows;   // n x L blended prior entries P'(c, .)
  double lambda = 1.0; // batch lambda (1.0 when nothing could be mixed)
  std::size_t num_mixed = 0;
};

// Pairs every sample with a random same-label partner drawn from the
// minority-flagged samples of the batch; samples whose label has no such
// partner pass through with their own prior column. Labels never change.
MixupResult group_mixup(const TensorF& inputs,
                        std::span<const std::size_t> labels,
                        std::span<const std::size_t> attrs,
                        std::span<const std::uint8_t> minority_flags,
                        const GroupPrior& prior, double tau, Rng& rng,
                        bool static_lambda = false);

} // namespace lc
