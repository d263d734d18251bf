#include "lc/topology.hpp"

namespace lc {

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::OneToOne: return "one-to-one";
    case TopologyKind::ManyToOne: return "many-to-one";
    case TopologyKind::OneToMany: return "one-to-many";
    case TopologyKind::ManyToMany: return "many-to-many";
  }
  throw config_error("unknown topology kind");
}

TopologyKind topology_kind_from_string(const std::string& name) {
  if (name == "one-to-one" || name == "1to1") return TopologyKind::OneToOne;
  if (name == "many-to-one" || name == "mto1") return TopologyKind::ManyToOne;
  if (name == "one-to-many" || name == "1tom") return TopologyKind::OneToMany;
  if (name == "many-to-many" || name == "mtom")
    return TopologyKind::ManyToMany;
  throw config_error("unknown topology kind: " + name);
}

} // namespace lc
