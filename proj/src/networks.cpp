// Fixed network templates.
//
// Tree templates: node 0 is the core (and Red's entry), followed by the edge,
// aggregation, access and subnet layers. Every access node gets at least one
// subnet leaf; the remaining leaves are spread over access nodes by the seed.

#include <algorithm>
#include <array>
#include <cctype>

#include "hotdesk/error.hpp"
#include "hotdesk/graph.hpp"
#include "hotdesk/rng.hpp"

namespace hotdesk::graph {
namespace {

struct TreeTemplate {
  const char* id;
  int nodes;
  int branches;
  int aggregation_per_edge;
  int access_per_aggregation;
};

constexpr std::array<TreeTemplate, 5> kTrees{{
    {"tree30", 30, 4, 1, 2},
    {"tree40", 40, 6, 1, 2},
    {"tree50", 50, 4, 2, 2},
    {"tree70", 70, 8, 1, 2},
    {"tree90", 90, 4, 2, 3},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Network build_tree(const TreeTemplate& t, std::uint64_t seed) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<Layer> layers{Layer::Core};
  auto add = [&](NodeId parent, Layer layer) {
    auto id = static_cast<NodeId>(layers.size());
    layers.push_back(layer);
    edges.emplace_back(parent, id);
    return id;
  };

  std::vector<NodeId> edge_nodes, agg_nodes, access_nodes;
  for (int b = 0; b < t.branches; ++b) edge_nodes.push_back(add(0, Layer::Edge));
  for (NodeId e : edge_nodes) {
    for (int k = 0; k < t.aggregation_per_edge; ++k) agg_nodes.push_back(add(e, Layer::Aggregation));
  }
  for (NodeId a : agg_nodes) {
    for (int k = 0; k < t.access_per_aggregation; ++k) access_nodes.push_back(add(a, Layer::Access));
  }

  const int fixed = static_cast<int>(layers.size());
  const int subnets = t.nodes - fixed;
  const int extra = subnets - static_cast<int>(access_nodes.size());
  std::vector<int> per_access(access_nodes.size(), 1);
  Rng rng(derive_seed(seed, {0x7472656555ULL}));
  for (int k = 0; k < extra; ++k) per_access[uniform_index(rng, access_nodes.size())] += 1;

  for (std::size_t i = 0; i < access_nodes.size(); ++i) {
    for (int k = 0; k < per_access[i]; ++k) add(access_nodes[i], Layer::Subnet);
  }
  return Network(t.nodes, std::move(edges), 0, std::move(layers), t.id, seed);
}

// Six small trees (root, three mid nodes, eight leaves) whose roots form a
// ring. Entry is the first root.
Network build_forest(std::uint64_t seed) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<Layer> layers;
  std::vector<NodeId> roots;
  constexpr std::array<int, 3> kLeavesPerMid{3, 3, 2};
  for (int tree = 0; tree < 6; ++tree) {
    auto root = static_cast<NodeId>(layers.size());
    roots.push_back(root);
    layers.push_back(Layer::Core);
    for (int leaves : kLeavesPerMid) {
      auto mid = static_cast<NodeId>(layers.size());
      layers.push_back(Layer::Aggregation);
      edges.emplace_back(root, mid);
      for (int k = 0; k < leaves; ++k) {
        edges.emplace_back(mid, static_cast<NodeId>(layers.size()));
        layers.push_back(Layer::Subnet);
      }
    }
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    edges.emplace_back(roots[i], roots[(i + 1) % roots.size()]);
  }
  return Network(72, std::move(edges), 0, std::move(layers), "forest72", seed);
}

// Four fully meshed core servers, a ring of ten optical switches each
// attached to one server, four access leaves per switch. Entry is switch 0.
Network build_optical_core(std::uint64_t seed) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<Layer> layers(4, Layer::Core);
  for (NodeId a = 0; a < 4; ++a) {
    for (NodeId b = a + 1; b < 4; ++b) edges.emplace_back(a, b);
  }
  constexpr int kRing = 10;
  for (int i = 0; i < kRing; ++i) {
    layers.push_back(Layer::Edge);
    NodeId sw = 4 + i;
    edges.emplace_back(sw, i % 4);
    edges.emplace_back(sw, 4 + (i + 1) % kRing);
  }
  for (int i = 0; i < kRing; ++i) {
    for (int k = 0; k < 4; ++k) {
      edges.emplace_back(4 + i, static_cast<NodeId>(layers.size()));
      layers.push_back(Layer::Subnet);
    }
  }
  return Network(54, std::move(edges), 4, std::move(layers), "optical54", seed);
}

}  // namespace

std::vector<std::string> topology_ids() {
  std::vector<std::string> ids;
  for (const auto& t : kTrees) ids.emplace_back(t.id);
  ids.emplace_back("forest72");
  ids.emplace_back("optical54");
  return ids;
}

std::string canonical_topology_id(std::string_view name) {
  std::string s = lower(name);
  if (s.rfind("treenetwork", 0) == 0) s = "tree" + s.substr(11);
  if (s == "forestnetwork" || s == "forest") s = "forest72";
  if (s == "opticalcorenetwork" || s == "opticalcore" || s == "optical") s = "optical54";
  for (const auto& id : topology_ids()) {
    if (id == s) return id;
  }
  std::string msg = "unknown topology '" + std::string(name) + "'; valid ids:";
  for (const auto& id : topology_ids()) msg += " " + id;
  throw ConfigError(msg);
}

Network generate_tree_network(std::string_view name, std::uint64_t seed) {
  const std::string id = canonical_topology_id(name);
  for (const auto& t : kTrees) {
    if (id == t.id) return build_tree(t, seed);
  }
  throw ConfigError("'" + std::string(name) + "' is not a tree topology");
}

Network generate_network(std::string_view name, std::uint64_t seed) {
  const std::string id = canonical_topology_id(name);
  if (id == "forest72") return build_forest(seed);
  if (id == "optical54") return build_optical_core(seed);
  return generate_tree_network(id, seed);
}

}  // namespace hotdesk::graph
