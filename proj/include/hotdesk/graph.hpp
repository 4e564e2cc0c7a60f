#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hotdesk/matrix.hpp"

namespace hotdesk::graph {

using NodeId = int;

enum class Layer { Core, Edge, Aggregation, Access, Subnet };

std::string_view to_string(Layer layer);
Layer layer_from_string(std::string_view name);

/// Static network topology. Undirected, unweighted, connected.
///
/// Node ids are 0..n-1. The entry node is Red's foothold and does not change
/// between episodes played on the same network.
class Network {
 public:
  /// Builds a network from an edge list. Throws ConfigError on self loops,
  /// out-of-range ids, duplicate edges, a bad entry node or a disconnected
  /// graph. Layers default to Subnet when empty.
  Network(int node_count, std::vector<std::pair<NodeId, NodeId>> edges, NodeId entry,
          std::vector<Layer> layers = {}, std::string name = "custom", std::uint64_t seed = 0);

  int node_count() const { return node_count_; }
  NodeId entry() const { return entry_; }
  const std::string& name() const { return name_; }
  std::uint64_t seed() const { return seed_; }

  /// Sorted, each edge stored once with first < second.
  const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }
  /// Sorted neighbour list.
  const std::vector<NodeId>& neighbors(NodeId v) const { return adjacency_[v]; }
  int degree(NodeId v) const { return static_cast<int>(adjacency_[v].size()); }
  bool adjacent(NodeId a, NodeId b) const;
  Layer layer(NodeId v) const { return layers_[v]; }
  const std::vector<Layer>& layers() const { return layers_; }

  /// Degree-1 nodes, ascending.
  const std::vector<NodeId>& leaves() const { return leaves_; }

  /// Number of branches hanging off node 0 (the core for tree templates).
  int branch_count() const { return degree(0); }
  /// Branch index of each node: index of the first hop from node 0 on a BFS
  /// path (lowest-id tie break). Node 0 itself gets -1.
  const std::vector<int>& branch_of() const { return branch_of_; }

  bool operator==(const Network& other) const;

 private:
  int node_count_;
  NodeId entry_;
  std::string name_;
  std::uint64_t seed_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<Layer> layers_;
  std::vector<NodeId> leaves_;
  std::vector<int> branch_of_;
};

/// All-pairs hop distances plus the diameter.
struct CostMatrix {
  Matrix<int> dist;
  int diameter = 0;

  int operator()(NodeId i, NodeId j) const { return dist(i, j); }
  std::size_t size() const { return dist.rows(); }
};

/// Three distinct non-entry leaves. target_index is set by the environment
/// once the episode outcome is known (-1 until then).
struct HvnPlacement {
  std::vector<NodeId> hvns;
  int target_index = -1;

  NodeId target() const { return hvns.at(static_cast<std::size_t>(target_index)); }
  bool contains(NodeId v) const;
  bool operator==(const HvnPlacement&) const = default;
};

/// Known generator ids: tree30, tree40, tree50, tree70, tree90, forest72,
/// optical54. Matching is case-insensitive and accepts the long names
/// (TreeNetwork30, ForestNetwork, OpticalCoreNetwork).
std::vector<std::string> topology_ids();
std::string canonical_topology_id(std::string_view name);

/// Deterministic per (name, seed). Throws ConfigError for unknown ids.
Network generate_network(std::string_view name, std::uint64_t seed);
/// Tree templates only (Tree30..Tree90).
Network generate_tree_network(std::string_view name, std::uint64_t seed);

/// Breadth-first distances from one source; -1 for unreachable nodes.
std::vector<int> bfs_distances(const Network& net, NodeId source);

/// Hop-count distance matrix. Throws Error if the graph is disconnected.
CostMatrix all_pairs_shortest_paths(const Network& net);

/// Shortest path from `from` to `to` (both inclusive). Among equal-length
/// paths, the one whose predecessors have the lowest ids is returned.
std::vector<NodeId> shortest_path(const Network& net, NodeId from, NodeId to);

/// Samples three distinct leaves (excluding the entry) uniformly without
/// replacement. Throws Error when fewer than three are eligible.
HvnPlacement place_high_value_nodes(const Network& net, std::uint64_t rng_seed);

/// min(dist to entry, dist to target HVN) per node.
std::vector<double> node_remoteness(const Network& net, const CostMatrix& cm,
                                    const HvnPlacement& placement);
/// Distance to the entry node only.
std::vector<double> node_remoteness_entry(const Network& net, const CostMatrix& cm);

}  // namespace hotdesk::graph
