#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lc/tensor.hpp"
#include "lc/topology.hpp"

namespace lc {

// Samples live in one feature matrix; split_flag selects train (0) or
// test (1). Attributes are carried for every sample but the trainer must
// only ever read them on the test split; train-split attributes exist for
// post-hoc diagnostics.
struct BiasedDataset {
  std::size_t d = 0;
  std::size_t L = 0;
  std::size_t K = 0;
  double minority_ratio = 0.0;
  CorrelationTopology topology;
  std::uint64_t seed = 0;
  bool synthetic_glyphs = false;

  TensorF features; // n x d
  std::vector<std::uint8_t> labels;
  std::vector<std::uint8_t> attrs;
  std::vector<std::uint8_t> split_flag; // 0 train, 1 test
  std::vector<std::string> warnings;

  std::size_t size() const { return labels.size(); }
  std::size_t group_id(std::size_t i) const {
    return std::size_t(labels[i]) * K + attrs[i];
  }
  bool is_aligned(std::size_t i) const {
    const auto& attrs_of =
        topology.group_to_attrs[topology.group_of_label(labels[i])];
    for (std::size_t a : attrs_of)
      if (a == attrs[i]) return true;
    return false;
  }

  std::vector<std::size_t> train_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < size(); ++i)
      if (split_flag[i] == 0) idx.push_back(i);
    return idx;
  }
  std::vector<std::size_t> test_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < size(); ++i)
      if (split_flag[i] == 1) idx.push_back(i);
    return idx;
  }

  void validate() const;
};

// Reconstructs the fixed wiring used by the dataset builders for a given
// kind and (L, K): many-to-one merges the first L-K+1 labels onto attribute
// 0, one-to-many gives label 0 the first K-L+1 attribute values, and
// many-to-many does both (labels 0 and 1 share a group that owns K-L+2
// attribute values).
CorrelationTopology canonical_topology(TopologyKind kind, std::size_t L,
                                       std::size_t K);

// LCDS1 container: magic "LCDS1", little-endian int32 n, d, L, K,
// topology kind, float32 minority ratio, then per sample d float32
// features, uint8 y, uint8 a, uint8 split flag.
void save_dataset(const BiasedDataset& ds, const std::string& path);
BiasedDataset load_dataset(const std::string& path);

// CSV manifest with columns index,y,a,group,split.
void write_dataset_manifest_csv(const BiasedDataset& ds,
                                const std::string& path);

} // namespace lc
