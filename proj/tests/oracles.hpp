#pragma once

// Reference implementations used only by tests. None of them shares code
// with the library: the transport oracle enumerates basic feasible solutions,
// the tree oracle uses the subtree-flow closed form, the distance oracle is
// Floyd-Warshall / per-pair BFS.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "hotdesk/graph.hpp"
#include "hotdesk/transport.hpp"

namespace oracle {

using Edges = std::vector<std::pair<int, int>>;

/// Minimum cost over all vertices of the transportation polytope. A vertex
/// is a basic solution: a spanning tree of the bipartite row/column graph on
/// m + n - 1 cells, solved by repeatedly peeling a leaf.
inline double transport_by_vertices(const std::vector<double>& supply, const std::vector<double>& demand,
                                    const std::vector<std::vector<double>>& cost) {
  const int m = static_cast<int>(supply.size()), n = static_cast<int>(demand.size());
  const int cells = m * n, basis = m + n - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(basis));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == basis) {
      std::vector<double> rem(supply);
      rem.insert(rem.end(), demand.begin(), demand.end());
      std::vector<int> degree(static_cast<std::size_t>(m + n), 0);
      std::vector<bool> used(static_cast<std::size_t>(basis), false);
      for (int c : pick) {
        ++degree[c / n];
        ++degree[m + c % n];
      }
      double total = 0.0;
      for (int round = 0; round < basis; ++round) {
        int leaf_cell = -1, leaf_node = -1;
        for (int k = 0; k < basis && leaf_cell < 0; ++k) {
          if (used[k]) continue;
          const int r = pick[k] / n, col = m + pick[k] % n;
          if (degree[r] == 1) {
            leaf_cell = k;
            leaf_node = r;
          } else if (degree[col] == 1) {
            leaf_cell = k;
            leaf_node = col;
          }
        }
        if (leaf_cell < 0) return;  // cycle: not a tree
        const int r = pick[leaf_cell] / n, col = m + pick[leaf_cell] % n;
        const int other = leaf_node == r ? col : r;
        const double flow = rem[leaf_node];
        if (flow < -1e-12) return;  // infeasible vertex
        rem[leaf_node] = 0.0;
        rem[other] -= flow;
        --degree[r];
        --degree[col];
        used[leaf_cell] = true;
        total += flow * cost[r][col - m];
      }
      for (double x : rem) {
        if (std::abs(x) > 1e-9) return;
      }
      best = std::min(best, total);
      return;
    }
    for (int c = start; c <= cells - (basis - depth); ++c) {
      pick[depth] = c;
      rec(c + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

/// Brute-force Wasserstein cost on the supports of p and q.
inline double wasserstein_by_vertices(const std::vector<double>& p, const std::vector<double>& q,
                                      const std::vector<std::vector<int>>& dist) {
  std::vector<int> sp, sq;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) sp.push_back(static_cast<int>(i));
    if (q[i] > 0) sq.push_back(static_cast<int>(i));
  }
  std::vector<double> a, b;
  for (int i : sp) a.push_back(p[i]);
  for (int j : sq) b.push_back(q[j]);
  std::vector<std::vector<double>> c(sp.size(), std::vector<double>(sq.size()));
  for (std::size_t i = 0; i < sp.size(); ++i) {
    for (std::size_t j = 0; j < sq.size(); ++j) c[i][j] = dist[sp[i]][sq[j]];
  }
  return transport_by_vertices(a, b, c);
}

/// Floyd-Warshall hop distances; -1 when unreachable.
inline std::vector<std::vector<int>> floyd_warshall(int n, const Edges& edges) {
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (auto [a, b] : edges) d[a][b] = d[b][a] = 1;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  for (auto& row : d) {
    for (int& x : row) {
      if (x >= inf) x = -1;
    }
  }
  return d;
}

/// Single-pair BFS over an edge list.
inline int pair_bfs(int n, const Edges& edges, int from, int to) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> seen(n, -1);
  std::deque<int> queue{from};
  seen[from] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    if (v == to) return seen[v];
    for (int w : adj[v]) {
      if (seen[w] < 0) {
        seen[w] = seen[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return -1;
}

/// W1 on a tree: sum over edges of |P(subtree) - Q(subtree)|, rooted at 0.
inline double tree_w1(int n, const Edges& edges, const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> parent(n, -1), order;
  std::vector<bool> seen(n, false);
  std::deque<int> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    order.push_back(v);
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        parent[w] = v;
        queue.push_back(w);
      }
    }
  }
  std::vector<double> excess(n);
  for (int v = 0; v < n; ++v) excess[v] = p[v] - q[v];
  double total = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    if (parent[v] < 0) continue;
    total += std::abs(excess[v]);
    excess[parent[v]] += excess[v];
  }
  return total;
}

/// Random connected graph: random recursive tree plus `extra` chords.
inline Edges random_connected(int n, int extra, std::mt19937_64& rng) {
  Edges edges;
  for (int v = 1; v < n; ++v) {
    const int u = std::uniform_int_distribution<int>(0, v - 1)(rng);
    edges.emplace_back(u, v);
  }
  for (int k = 0; k < extra; ++k) {
    int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
    int b = std::uniform_int_distribution<int>(0, n - 1)(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (std::find(edges.begin(), edges.end(), std::make_pair(a, b)) != edges.end() ||
        std::find(edges.begin(), edges.end(), std::make_pair(b, a)) != edges.end()) {
      continue;
    }
    edges.emplace_back(a, b);
  }
  return edges;
}

/// Random distribution with `support` non-zero entries (all when 0).
inline std::vector<double> random_distribution(int n, int support, std::mt19937_64& rng) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  if (support <= 0 || support > n) support = n;
  std::vector<double> p(n, 0.0);
  std::exponential_distribution<double> ex(1.0);
  double total = 0.0;
  for (int k = 0; k < support; ++k) {
    p[idx[k]] = ex(rng) + 1e-3;
    total += p[idx[k]];
  }
  for (double& x : p) x /= total;
  return p;
}

inline std::vector<std::vector<int>> to_vectors(const hotdesk::graph::CostMatrix& cm) {
  std::vector<std::vector<int>> d(cm.size(), std::vector<int>(cm.size()));
  for (std::size_t i = 0; i < cm.size(); ++i) {
    for (std::size_t j = 0; j < cm.size(); ++j) d[i][j] = cm.dist(i, j);
  }
  return d;
}

/// Central difference of f along e_i - (1/n) 1 at x.
template <typename F>
std::vector<double> tangent_gradient(F&& f, const std::vector<double>& x, double h) {
  const std::size_t n = x.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> up(x), down(x);
    for (std::size_t j = 0; j < n; ++j) {
      const double dir = (i == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(n);
      up[j] += h * dir;
      down[j] -= h * dir;
    }
    g[i] = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

}  // namespace oracle
