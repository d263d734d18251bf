#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lc/errors.hpp"
#include "lc/numerics.hpp"
#include "lc/topology.hpp"

namespace lc {

// Splits a group's probability mass across its attribute values when a label
// correlates with several of them. Runs online k-means (k = group
// multiplicity) over the ERM probability vectors seen for that group and
// assigns a sample's mass to its nearest centroid. Falls back to equal
// weights until every centroid is seeded.
class AttributeSplitter {
 public:
  AttributeSplitter() = default;
  AttributeSplitter(const CorrelationTopology& topo)
      : L_(topo.L), centroids_(topo.num_groups()),
        counts_(topo.num_groups()) {
    for (std::size_t g = 0; g < topo.num_groups(); ++g) {
      const std::size_t m = topo.group_to_attrs[g].size();
      centroids_[g].assign(m, std::vector<double>());
      counts_[g].assign(m, 0);
    }
  }

  void observe(std::size_t group, std::span<const double> erm_probs) {
    if (group >= centroids_.size())
      throw config_error("splitter group out of range");
    auto& cents = centroids_[group];
    auto& counts = counts_[group];
    if (cents.size() < 2) return;
    for (std::size_t j = 0; j < cents.size(); ++j) {
      if (counts[j] == 0) {
        if (j > 0 && same_point(cents, counts, erm_probs, j)) return;
        cents[j].assign(erm_probs.begin(), erm_probs.end());
        counts[j] = 1;
        return;
      }
    }
    const std::size_t j = nearest(cents, erm_probs);
    counts[j] += 1;
    const double step = 1.0 / double(counts[j]);
    for (std::size_t i = 0; i < cents[j].size(); ++i)
      cents[j][i] += step * (erm_probs[i] - cents[j][i]);
  }

  // w sums to 1 over the group's attribute slots.
  void split_weights(std::size_t group, std::span<const double> erm_probs,
                     std::span<double> w) const {
    if (group >= centroids_.size())
      throw config_error("splitter group out of range");
    const auto& cents = centroids_[group];
    const auto& counts = counts_[group];
    const std::size_t m = w.size();
    if (m != cents.size())
      throw config_error("splitter weight span length mismatch");
    bool ready = m >= 2;
    for (std::size_t j = 0; j < m; ++j)
      if (counts[j] == 0) ready = false;
    if (!ready) {
      for (double& v : w) v = 1.0 / double(m);
      return;
    }
    for (double& v : w) v = 0.0;
    w[nearest(cents, erm_probs)] = 1.0;
  }

 private:
  static std::size_t nearest(const std::vector<std::vector<double>>& cents,
                             std::span<const double> x) {
    std::size_t best = 0;
    double best_d2 = -1.0;
    for (std::size_t j = 0; j < cents.size(); ++j) {
      if (cents[j].empty()) continue;
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - cents[j][i];
        d2 += d * d;
      }
      if (best_d2 < 0.0 || d2 < best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    return best;
  }

  static bool same_point(const std::vector<std::vector<double>>& cents,
                         const std::vector<std::size_t>& counts,
                         std::span<const double> x, std::size_t upto) {
    for (std::size_t j = 0; j < upto; ++j) {
      if (counts[j] == 0) continue;
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - cents[j][i];
        d2 += d * d;
      }
      if (d2 < 1e-12) return true;
    }
    return false;
  }

  std::size_t L_ = 0;
  std::vector<std::vector<std::vector<double>>> centroids_;
  std::vector<std::vector<std::size_t>> counts_;
};

// P(a | x) over attribute values, from the ERM branch's class posterior.
// Merged labels pool their mass; a group covering several attribute values
// splits its mass by the splitter's weights (equal weights when splitter is
// null).
inline void attribute_posterior(std::span<const double> erm_probs,
                                const CorrelationTopology& topo,
                                const AttributeSplitter* splitter,
                                std::span<double> out) {
  if (erm_probs.size() != topo.L)
    throw config_error("attribute_posterior: expected " +
                       std::to_string(topo.L) + " class probabilities, got " +
                       std::to_string(erm_probs.size()));
  if (out.size() != topo.K)
    throw config_error("attribute_posterior: output span must have length K");
  std::vector<double> group_mass(topo.num_groups(), 0.0);
  for (std::size_t y = 0; y < topo.L; ++y)
    group_mass[topo.label_to_group[y]] += erm_probs[y];
  std::vector<double> w;
  for (std::size_t g = 0; g < topo.num_groups(); ++g) {
    const auto& attrs = topo.group_to_attrs[g];
    if (attrs.size() == 1) {
      out[attrs[0]] = group_mass[g];
      continue;
    }
    w.resize(attrs.size());
    if (splitter) {
      splitter->split_weights(g, erm_probs, w);
    } else {
      for (double& v : w) v = 1.0 / double(attrs.size());
    }
    for (std::size_t j = 0; j < attrs.size(); ++j)
      out[attrs[j]] = group_mass[g] * w[j];
  }
}

inline std::vector<double> attribute_posterior(
    std::span<const double> erm_probs, const CorrelationTopology& topo,
    const AttributeSplitter* splitter = nullptr) {
  std::vector<double> out(topo.K);
  attribute_posterior(erm_probs, topo, splitter, out);
  return out;
}

inline std::size_t infer_attribute(std::span<const double> erm_probs,
                                   const CorrelationTopology& topo,
                                   const AttributeSplitter* splitter =
                                       nullptr) {
  const std::vector<double> post =
      attribute_posterior(erm_probs, topo, splitter);
  return argmax_smallest(std::span<const double>(post));
}

template <class T>
bool is_minority(std::span<const T> erm_probs, std::size_t y) {
  return argmax_smallest(erm_probs) != y;
}

} // namespace lc
