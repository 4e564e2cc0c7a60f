#include "hotdesk/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "hotdesk/error.hpp"
#include "hotdesk/rng.hpp"

namespace hotdesk::graph {

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::Core: return "core";
    case Layer::Edge: return "edge";
    case Layer::Aggregation: return "aggregation";
    case Layer::Access: return "access";
    case Layer::Subnet: return "subnet";
  }
  return "subnet";
}

Layer layer_from_string(std::string_view name) {
  for (Layer l : {Layer::Core, Layer::Edge, Layer::Aggregation, Layer::Access, Layer::Subnet}) {
    if (to_string(l) == name) return l;
  }
  throw ConfigError("unknown layer label '" + std::string(name) + "'");
}

Network::Network(int node_count, std::vector<std::pair<NodeId, NodeId>> edges, NodeId entry,
                 std::vector<Layer> layers, std::string name, std::uint64_t seed)
    : node_count_(node_count), entry_(entry), name_(std::move(name)), seed_(seed) {
  if (node_count <= 0) throw ConfigError("network needs at least one node");
  if (entry < 0 || entry >= node_count) throw ConfigError("entry node out of range");
  if (layers.empty()) layers.assign(static_cast<std::size_t>(node_count), Layer::Subnet);
  if (static_cast<int>(layers.size()) != node_count) {
    throw ConfigError("layer list length does not match node count");
  }
  layers_ = std::move(layers);

  for (auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= node_count || b >= node_count) {
      throw ConfigError("edge endpoint out of range");
    }
    if (a == b) throw ConfigError("self loop on node " + std::to_string(a));
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw ConfigError("duplicate edge");
  }
  edges_ = std::move(edges);

  adjacency_.assign(static_cast<std::size_t>(node_count), {});
  for (auto [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());

  for (NodeId v = 0; v < node_count; ++v) {
    if (degree(v) == 1) leaves_.push_back(v);
  }

  auto d = bfs_distances(*this, 0);
  if (std::any_of(d.begin(), d.end(), [](int x) { return x < 0; })) {
    throw ConfigError("network '" + name_ + "' is disconnected");
  }

  // Branch labels: propagate the first hop out of node 0 along a BFS tree.
  branch_of_.assign(static_cast<std::size_t>(node_count), -1);
  std::deque<NodeId> queue;
  std::vector<bool> seen(static_cast<std::size_t>(node_count), false);
  seen[0] = true;
  const auto& root_nb = adjacency_[0];
  for (std::size_t k = 0; k < root_nb.size(); ++k) {
    branch_of_[root_nb[k]] = static_cast<int>(k);
    seen[root_nb[k]] = true;
    queue.push_back(root_nb[k]);
  }
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    for (NodeId w : adjacency_[v]) {
      if (seen[w]) continue;
      seen[w] = true;
      branch_of_[w] = branch_of_[v];
      queue.push_back(w);
    }
  }
}

bool Network::adjacent(NodeId a, NodeId b) const {
  const auto& nb = adjacency_[a];
  return std::binary_search(nb.begin(), nb.end(), b);
}

bool Network::operator==(const Network& other) const {
  return node_count_ == other.node_count_ && entry_ == other.entry_ && edges_ == other.edges_ &&
         layers_ == other.layers_;
}

bool HvnPlacement::contains(NodeId v) const {
  return std::find(hvns.begin(), hvns.end(), v) != hvns.end();
}

std::vector<int> bfs_distances(const Network& net, NodeId source) {
  std::vector<int> dist(static_cast<std::size_t>(net.node_count()), -1);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    for (NodeId w : net.neighbors(v)) {
      if (dist[w] >= 0) continue;
      dist[w] = dist[v] + 1;
      queue.push_back(w);
    }
  }
  return dist;
}

CostMatrix all_pairs_shortest_paths(const Network& net) {
  const auto n = static_cast<std::size_t>(net.node_count());
  CostMatrix cm{Matrix<int>(n, n, 0), 0};
  for (NodeId s = 0; s < net.node_count(); ++s) {
    auto d = bfs_distances(net, s);
    for (std::size_t t = 0; t < n; ++t) {
      if (d[t] < 0) {
        throw Error("all_pairs_shortest_paths: node " + std::to_string(t) +
                    " unreachable from node " + std::to_string(s));
      }
      cm.dist(s, t) = d[t];
      cm.diameter = std::max(cm.diameter, d[t]);
    }
  }
  return cm;
}

std::vector<NodeId> shortest_path(const Network& net, NodeId from, NodeId to) {
  // Distances from the destination; walk forward picking the lowest-id
  // neighbour that is one hop closer.
  auto d = bfs_distances(net, to);
  if (d[from] < 0) throw Error("shortest_path: no route");
  std::vector<NodeId> path{from};
  NodeId cur = from;
  while (cur != to) {
    for (NodeId w : net.neighbors(cur)) {
      if (d[w] == d[cur] - 1) {
        cur = w;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

HvnPlacement place_high_value_nodes(const Network& net, std::uint64_t rng_seed) {
  std::vector<NodeId> eligible;
  for (NodeId v : net.leaves()) {
    if (v != net.entry()) eligible.push_back(v);
  }
  if (eligible.size() < 3) {
    throw Error("network '" + net.name() + "' has only " + std::to_string(eligible.size()) +
                " eligible leaves for high-value nodes");
  }
  Rng rng(rng_seed);
  // Partial Fisher-Yates: the first three slots are a uniform 3-subset in
  // uniformly random order.
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t j = i + uniform_index(rng, eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
  }
  return HvnPlacement{{eligible[0], eligible[1], eligible[2]}, -1};
}

std::vector<double> node_remoteness(const Network& net, const CostMatrix& cm,
                                    const HvnPlacement& placement) {
  if (placement.target_index < 0) throw Error("node_remoteness: target HVN not set");
  const NodeId target = placement.target();
  std::vector<double> out(static_cast<std::size_t>(net.node_count()));
  for (NodeId v = 0; v < net.node_count(); ++v) {
    out[v] = std::min(cm(v, net.entry()), cm(v, target));
  }
  return out;
}

std::vector<double> node_remoteness_entry(const Network& net, const CostMatrix& cm) {
  std::vector<double> out(static_cast<std::size_t>(net.node_count()));
  for (NodeId v = 0; v < net.node_count(); ++v) out[v] = cm(v, net.entry());
  return out;
}

}  // namespace hotdesk::graph
