#include "lc/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "lc/errors.hpp"
#include "lc/numerics.hpp"
#include "lc/rng.hpp"

namespace lc {

double DiscreteInstance::px(std::size_t x) const {
  double s = 0.0;
  for (std::size_t y = 0; y < L; ++y)
    for (std::size_t a = 0; a < K; ++a) s += p(x, y, a);
  return s;
}

double DiscreteInstance::pya(std::size_t y, std::size_t a) const {
  double s = 0.0;
  for (std::size_t x = 0; x < X; ++x) s += p(x, y, a);
  return s;
}

double DiscreteInstance::py_given_x(std::size_t x, std::size_t y) const {
  double s = 0.0;
  for (std::size_t a = 0; a < K; ++a) s += p(x, y, a);
  return s / px(x);
}

double DiscreteInstance::pa_given_x(std::size_t x, std::size_t a) const {
  double s = 0.0;
  for (std::size_t y = 0; y < L; ++y) s += p(x, y, a);
  return s / px(x);
}

bool DiscreteInstance::one_hot_attr(double tol) const {
  for (std::size_t x = 0; x < X; ++x) {
    std::size_t support = 0;
    for (std::size_t a = 0; a < K; ++a) {
      double s = 0.0;
      for (std::size_t y = 0; y < L; ++y) s += p(x, y, a);
      if (s > tol) ++support;
    }
    if (support != 1) return false;
  }
  return true;
}

std::size_t DiscreteInstance::attr_of(std::size_t x) const {
  std::size_t best = 0;
  double best_mass = -1.0;
  for (std::size_t a = 0; a < K; ++a) {
    double s = 0.0;
    for (std::size_t y = 0; y < L; ++y) s += p(x, y, a);
    if (s > best_mass) {
      best_mass = s;
      best = a;
    }
  }
  return best;
}

void DiscreteInstance::validate() const {
  if (X == 0 || L < 2 || K == 0)
    throw config_error("discrete instance needs X >= 1, L >= 2, K >= 1");
  if (X > 12) throw config_error("discrete instance domain capped at 12");
  if (joint.data.size() != X * L * K)
    throw config_error("discrete instance joint table size mismatch");
  double total = 0.0;
  for (double v : joint.data) {
    if (v < 0.0) throw config_error("joint table has a negative entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw config_error("joint table must sum to 1 within 1e-12");
}

DiscreteInstance DiscreteInstance::from_conditionals(
    const std::vector<double>& px,
    const std::vector<std::vector<double>>& py_given_x,
    const std::vector<std::size_t>& attr_of_x, std::size_t K) {
  const std::size_t X = px.size();
  if (py_given_x.size() != X || attr_of_x.size() != X)
    throw config_error("from_conditionals: per-x arrays disagree");
  const std::size_t L = py_given_x.empty() ? 0 : py_given_x[0].size();
  DiscreteInstance inst;
  inst.X = X;
  inst.L = L;
  inst.K = K;
  inst.joint = TensorD::zeros({X, L, K});
  double total = 0.0;
  for (std::size_t x = 0; x < X; ++x) {
    if (py_given_x[x].size() != L)
      throw config_error("from_conditionals: ragged P(y|x)");
    if (attr_of_x[x] >= K)
      throw config_error("from_conditionals: attribute out of range");
    for (std::size_t y = 0; y < L; ++y) {
      inst.joint.data[(x * L + y) * K + attr_of_x[x]] =
          px[x] * py_given_x[x][y];
      total += px[x] * py_given_x[x][y];
    }
  }
  for (double& v : inst.joint.data) v /= total;
  inst.validate();
  return inst;
}

DiscreteInstance DiscreteInstance::random(std::uint64_t seed, std::size_t X,
                                          std::size_t L, std::size_t K,
                                          bool project_one_hot) {
  DiscreteInstance inst;
  inst.X = X;
  inst.L = L;
  inst.K = K;
  inst.joint = TensorD::zeros({X, L, K});
  Rng rng(seed);
  double total = 0.0;
  for (double& v : inst.joint.data) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    v = -std::log(u);
    total += v;
  }
  for (double& v : inst.joint.data) v /= total;
  if (project_one_hot) {
    total = 0.0;
    for (std::size_t x = 0; x < X; ++x) {
      const std::size_t keep = inst.attr_of(x);
      for (std::size_t y = 0; y < L; ++y)
        for (std::size_t a = 0; a < K; ++a) {
          double& v = inst.joint.data[(x * L + y) * K + a];
          if (a != keep) v = 0.0;
          total += v;
        }
    }
    for (double& v : inst.joint.data) v /= total;
  }
  inst.validate();
  return inst;
}

namespace {

// w[x][y]: contribution of deciding y at x to the GBA, so that
// GBA(c) = sum_x w[x][c(x)]. Groups with zero mass are excluded from the
// group mean.
TensorD gba_weights(const DiscreteInstance& inst) {
  std::size_t groups = 0;
  TensorD pya = TensorD::zeros({inst.L, inst.K});
  for (std::size_t y = 0; y < inst.L; ++y)
    for (std::size_t a = 0; a < inst.K; ++a) {
      pya.at(y, a) = inst.pya(y, a);
      if (pya.at(y, a) > 0.0) ++groups;
    }
  if (groups == 0) throw config_error("instance has no populated groups");
  TensorD w = TensorD::zeros({inst.X, inst.L});
  for (std::size_t x = 0; x < inst.X; ++x)
    for (std::size_t y = 0; y < inst.L; ++y) {
      double s = 0.0;
      for (std::size_t a = 0; a < inst.K; ++a) {
        const double mass = inst.p(x, y, a);
        if (mass == 0.0) continue;
        if (pya.at(y, a) == 0.0)
          throw config_error("zero-mass group carries positive posterior");
        s += mass / pya.at(y, a);
      }
      w.at(x, y) = s / double(groups);
    }
  return w;
}

} // namespace

std::size_t bayes_rule_prediction(const DiscreteInstance& inst,
                                  std::size_t x) {
  if (x >= inst.X) throw config_error("bayes rule: x out of range");
  const double px = inst.px(x);
  if (px <= 0.0) throw config_error("bayes rule: x has zero mass");
  std::vector<double> score(inst.L, 0.0);
  for (std::size_t y = 0; y < inst.L; ++y)
    for (std::size_t a = 0; a < inst.K; ++a) {
      const double post = inst.p(x, y, a) / px; // P(y,a|x)
      if (post == 0.0) continue;
      const double prior = inst.pya(y, a);
      if (prior <= 0.0)
        throw config_error("bayes rule: zero-prior group with positive "
                           "posterior");
      score[y] += post / prior;
    }
  return argmax_smallest(std::span<const double>(score));
}

double classifier_gba(const DiscreteInstance& inst,
                      const std::vector<std::size_t>& decisions) {
  if (decisions.size() != inst.X)
    throw config_error("classifier_gba: one decision per x required");
  const TensorD w = gba_weights(inst);
  double s = 0.0;
  for (std::size_t x = 0; x < inst.X; ++x) {
    if (decisions[x] >= inst.L)
      throw config_error("classifier_gba: decision out of range");
    s += w.at(x, decisions[x]);
  }
  return s;
}

BruteForceResult brute_force_gba_max(const DiscreteInstance& inst) {
  double combos = 1.0;
  for (std::size_t x = 0; x < inst.X; ++x) {
    combos *= double(inst.L);
    if (combos > 1e6)
      throw config_error("enumeration bound exceeded; use a smaller "
                         "instance (L^X must stay within 1e6)");
  }
  const TensorD w = gba_weights(inst);
  BruteForceResult out;
  std::vector<std::size_t> c(inst.X, 0);
  const std::size_t total = std::size_t(combos);
  for (std::size_t it = 0; it < total; ++it) {
    double s = 0.0;
    for (std::size_t x = 0; x < inst.X; ++x) s += w.at(x, c[x]);
    if (out.enumerated == 0 || s > out.max_gba) out.max_gba = s;
    ++out.enumerated;
    // odometer increment
    for (std::size_t x = 0; x < inst.X; ++x) {
      if (++c[x] < inst.L) break;
      c[x] = 0;
    }
  }
  // second pass collects every maximizer within tolerance
  c.assign(inst.X, 0);
  for (std::size_t it = 0; it < total; ++it) {
    double s = 0.0;
    for (std::size_t x = 0; x < inst.X; ++x) s += w.at(x, c[x]);
    if (s >= out.max_gba - 1e-9) out.best.push_back(c);
    for (std::size_t x = 0; x < inst.X; ++x) {
      if (++c[x] < inst.L) break;
      c[x] = 0;
    }
  }
  return out;
}

ConsistencyResult surrogate_consistency_check(const DiscreteInstance& inst,
                                              LossMode mode,
                                              const ConsistencyOptions& opts) {
  if (mode == LossMode::LC && !inst.one_hot_attr())
    throw config_error("LC consistency check requires the one-hot "
                       "attribute condition");
  ConsistencyResult out;
  out.decisions.resize(inst.X);
  out.converged = true;
  const std::size_t L = inst.L;

  for (std::size_t x = 0; x < inst.X; ++x) {
    // Per-x population risk over a free logit vector. targets[y] is the
    // (possibly reweighted) label distribution the softmax must match;
    // offsets shift the logits before the softmax in LC mode.
    std::vector<double> target(L), offsets(L, 0.0);
    const std::size_t ax = inst.attr_of(x);
    double norm = 0.0;
    for (std::size_t y = 0; y < L; ++y) {
      double t = inst.py_given_x(x, y);
      if (mode == LossMode::ReweightedCE) {
        const double prior = inst.pya(y, ax);
        if (prior <= 0.0 && t > 0.0)
          throw config_error("reweighting hit a zero-mass group");
        t = prior > 0.0 ? t / prior : 0.0;
      }
      target[y] = t;
      norm += t;
    }
    for (double& t : target) t /= norm;
    if (mode == LossMode::LC) {
      for (std::size_t y = 0; y < L; ++y) {
        const double prior = inst.pya(y, ax);
        offsets[y] = std::log(std::max(prior, 1e-300));
      }
    }

    std::vector<double> f(L, 0.0), corrected(L), probs(L);
    double gnorm = 0.0;
    bool ok = false;
    for (std::size_t step = 0; step < opts.max_steps; ++step) {
      for (std::size_t y = 0; y < L; ++y) corrected[y] = f[y] + offsets[y];
      softmax(std::span<const double>(corrected), std::span<double>(probs));
      gnorm = 0.0;
      for (std::size_t y = 0; y < L; ++y) {
        const double g = probs[y] - target[y];
        gnorm += g * g;
        f[y] -= opts.step_size * g;
      }
      gnorm = std::sqrt(gnorm);
      if (gnorm < opts.grad_tolerance) {
        ok = true;
        break;
      }
    }
    if (!ok) out.converged = false;
    out.final_grad_norm = std::max(out.final_grad_norm, gnorm);
    out.decisions[x] = argmax_smallest(std::span<const double>(f));
  }

  const BruteForceResult bf = brute_force_gba_max(inst);
  out.max_gba = bf.max_gba;
  out.achieved_gba = classifier_gba(inst, out.decisions);
  out.match = out.achieved_gba >= out.max_gba - 1e-9;
  return out;
}

} // namespace lc
