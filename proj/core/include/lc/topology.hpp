#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "lc/errors.hpp"

namespace lc {

enum class TopologyKind : int {
  OneToOne = 0,
  ManyToOne = 1,
  OneToMany = 2,
  ManyToMany = 3,
};

std::string to_string(TopologyKind kind);
TopologyKind topology_kind_from_string(const std::string& name);

// Label/attribute wiring. Labels are first merged into groups (many-to-one
// part), then each group owns a contiguous block of attribute values
// (one-to-many part). The two pure cases use a single-label group or a
// single-attribute block.
struct CorrelationTopology {
  TopologyKind kind = TopologyKind::OneToOne;
  std::size_t L = 0;
  std::size_t K = 0;
  std::vector<std::size_t> label_to_group;
  std::vector<std::vector<std::size_t>> group_to_attrs;

  std::size_t num_groups() const { return group_to_attrs.size(); }

  std::size_t group_of_label(std::size_t y) const {
    if (y >= L) throw config_error("label out of range in topology");
    return label_to_group[y];
  }

  // Primary attribute value for a label: first attribute of its group.
  std::size_t primary_attr(std::size_t y) const {
    return group_to_attrs[group_of_label(y)].front();
  }

  std::size_t group_of_attr(std::size_t a) const {
    if (a >= K) throw config_error("attribute out of range in topology");
    for (std::size_t g = 0; g < group_to_attrs.size(); ++g)
      for (std::size_t v : group_to_attrs[g])
        if (v == a) return g;
    throw config_error("attribute not wired to any group");
  }

  void validate() const {
    if (L == 0 || K == 0) throw config_error("topology needs L, K >= 1");
    if (label_to_group.size() != L)
      throw config_error("topology label_to_group must have one entry per "
                         "label");
    std::vector<bool> attr_seen(K, false);
    std::vector<bool> group_used(group_to_attrs.size(), false);
    for (std::size_t g : label_to_group) {
      if (g >= group_to_attrs.size())
        throw config_error("topology label maps to unknown group");
      group_used[g] = true;
    }
    for (bool used : group_used)
      if (!used) throw config_error("topology has a group with no labels");
    std::size_t covered = 0;
    for (const auto& attrs : group_to_attrs) {
      if (attrs.empty())
        throw config_error("topology group owns no attribute values");
      for (std::size_t a : attrs) {
        if (a >= K) throw config_error("topology attribute id out of range");
        if (attr_seen[a])
          throw config_error("topology attribute owned by two groups");
        attr_seen[a] = true;
        ++covered;
      }
    }
    if (covered != K)
      throw config_error("topology attribute values must partition 0..K-1");
    if (kind == TopologyKind::OneToOne) {
      if (L != K) throw config_error("one-to-one topology needs L == K");
      for (std::size_t y = 0; y < L; ++y)
        if (group_to_attrs[label_to_group[y]] !=
            std::vector<std::size_t>{y})
          throw config_error("one-to-one topology must pair label j with "
                             "attribute j");
    }
  }

  static CorrelationTopology one_to_one(std::size_t n) {
    CorrelationTopology t;
    t.kind = TopologyKind::OneToOne;
    t.L = t.K = n;
    t.label_to_group.resize(n);
    std::iota(t.label_to_group.begin(), t.label_to_group.end(), 0);
    t.group_to_attrs.resize(n);
    for (std::size_t g = 0; g < n; ++g) t.group_to_attrs[g] = {g};
    t.validate();
    return t;
  }

  // label_to_attr[y] = shared attribute value; must hit every value in 0..K-1.
  static CorrelationTopology many_to_one(
      const std::vector<std::size_t>& label_to_attr, std::size_t K) {
    CorrelationTopology t;
    t.kind = TopologyKind::ManyToOne;
    t.L = label_to_attr.size();
    t.K = K;
    t.label_to_group = label_to_attr;
    t.group_to_attrs.resize(K);
    for (std::size_t a = 0; a < K; ++a) t.group_to_attrs[a] = {a};
    t.validate();
    return t;
  }

  // attr_multiplicity[y] = how many attribute values label y correlates
  // with; attribute ids are assigned label by label.
  static CorrelationTopology one_to_many(
      const std::vector<std::size_t>& attr_multiplicity) {
    CorrelationTopology t;
    t.kind = TopologyKind::OneToMany;
    t.L = attr_multiplicity.size();
    t.label_to_group.resize(t.L);
    std::iota(t.label_to_group.begin(), t.label_to_group.end(), 0);
    std::size_t next = 0;
    for (std::size_t m : attr_multiplicity) {
      if (m == 0) throw config_error("attribute multiplicity must be >= 1");
      std::vector<std::size_t> attrs(m);
      std::iota(attrs.begin(), attrs.end(), next);
      next += m;
      t.group_to_attrs.push_back(std::move(attrs));
    }
    t.K = next;
    t.validate();
    return t;
  }

  // Merge labels into groups, then give group g attr_multiplicity[g]
  // attribute values.
  static CorrelationTopology many_to_many(
      const std::vector<std::size_t>& label_to_group,
      const std::vector<std::size_t>& attr_multiplicity) {
    CorrelationTopology t;
    t.kind = TopologyKind::ManyToMany;
    t.L = label_to_group.size();
    t.label_to_group = label_to_group;
    std::size_t next = 0;
    for (std::size_t m : attr_multiplicity) {
      if (m == 0) throw config_error("attribute multiplicity must be >= 1");
      std::vector<std::size_t> attrs(m);
      std::iota(attrs.begin(), attrs.end(), next);
      next += m;
      t.group_to_attrs.push_back(std::move(attrs));
    }
    t.K = next;
    t.validate();
    return t;
  }
};

} // namespace lc
