#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lc/tensor.hpp"
#include "lc/trainer.hpp"

namespace lc {

// Fully enumerated joint P(x, y, a) on a domain small enough to brute-force
// every deterministic classifier.
struct DiscreteInstance {
  std::size_t X = 0;
  std::size_t L = 0;
  std::size_t K = 0;
  TensorD joint; // X x L x K, sums to 1

  double p(std::size_t x, std::size_t y, std::size_t a) const {
    return joint.data[(x * L + y) * K + a];
  }
  double px(std::size_t x) const;
  double pya(std::size_t y, std::size_t a) const;
  double py_given_x(std::size_t x, std::size_t y) const;
  double pa_given_x(std::size_t x, std::size_t a) const;

  // Every x carries exactly one attribute value with all of its mass.
  bool one_hot_attr(double tol = 1e-12) const;
  // The attribute owning x's mass; requires the one-hot condition.
  std::size_t attr_of(std::size_t x) const;

  void validate() const;

  static DiscreteInstance from_conditionals(
      const std::vector<double>& px,
      const std::vector<std::vector<double>>& py_given_x,
      const std::vector<std::size_t>& attr_of_x, std::size_t K);

  // Symmetric Dirichlet(1) joint; optionally projected so each x keeps only
  // its dominant attribute value.
  static DiscreteInstance random(std::uint64_t seed, std::size_t X,
                                 std::size_t L, std::size_t K,
                                 bool project_one_hot);
};

// argmax_y sum_a P(y,a|x) / P(y,a), groups with zero mass skipped.
std::size_t bayes_rule_prediction(const DiscreteInstance& inst,
                                  std::size_t x);

double classifier_gba(const DiscreteInstance& inst,
                      const std::vector<std::size_t>& decisions);

struct BruteForceResult {
  std::vector<std::vector<std::size_t>> best; // all maximizing decision maps
  double max_gba = 0.0;
  std::size_t enumerated = 0;
};

BruteForceResult brute_force_gba_max(const DiscreteInstance& inst);

struct ConsistencyOptions {
  double step_size = 1.0;
  double grad_tolerance = 1e-8;
  std::size_t max_steps = 100000;
};

struct ConsistencyResult {
  std::vector<std::size_t> decisions;
  bool match = false;
  bool converged = false;
  double final_grad_norm = 0.0;
  double achieved_gba = 0.0;
  double max_gba = 0.0;
};

// Minimizes the population surrogate risk over free per-x logits and
// compares the induced decisions with the enumerated GBA maximizers. LC
// corrections use the instance's true group priors.
ConsistencyResult surrogate_consistency_check(
    const DiscreteInstance& inst, LossMode mode,
    const ConsistencyOptions& opts = {});

} // namespace lc
