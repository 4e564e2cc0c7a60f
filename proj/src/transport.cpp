#include "hotdesk/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "hotdesk/error.hpp"

namespace hotdesk::transport {

NodeDistribution normalize(std::span<const double> raw) {
  double total = 0.0;
  for (double x : raw) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error("normalize: negative or non-finite mass");
    total += x;
  }
  if (total <= 0.0) throw Error("normalize: zero total mass");
  std::vector<double> out(raw.begin(), raw.end());
  for (double& x : out) x /= total;
  return NodeDistribution(std::move(out));
}

void check_distribution(const NodeDistribution& p, const char* what) {
  double total = 0.0;
  for (double x : p.mass) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(std::string(what) + ": entries must be finite and non-negative");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kNormalizationTol) {
    throw Error(std::string(what) + ": not normalized (sum = " + std::to_string(total) + ")");
  }
}

NodeDistribution point_mass(std::size_t n, graph::NodeId v) {
  std::vector<double> m(n, 0.0);
  m.at(static_cast<std::size_t>(v)) = 1.0;
  return NodeDistribution(std::move(m));
}

namespace {

struct Cell {
  int row;
  int col;
};

}  // namespace

TransportationResult solve_transportation(std::span<const double> supply,
                                          std::span<const double> demand,
                                          const Matrix<double>& cost) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (m == 0 || n == 0) throw Error("solve_transportation: empty problem");
  if (cost.rows() != supply.size() || cost.cols() != demand.size()) {
    throw Error("solve_transportation: cost table shape mismatch");
  }
  const double supply_total = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double demand_total = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (!(supply_total > 0.0) || !(demand_total > 0.0)) {
    throw Error("solve_transportation: totals must be positive");
  }

  // Rescale demand so both sides carry bit-comparable totals.
  std::vector<double> a(supply.begin(), supply.end());
  std::vector<double> b(demand.begin(), demand.end());
  for (double& x : b) x *= supply_total / demand_total;

  TransportationResult result{Matrix<double>(m, n, 0.0), 0.0, 0};
  Matrix<double>& x = result.flow;

  // Northwest-corner start. Produces exactly m+n-1 basic cells forming a
  // spanning tree of the bipartite row/column graph; degenerate cells carry 0.
  std::vector<Cell> basis;
  basis.reserve(static_cast<std::size_t>(m + n - 1));
  {
    std::vector<double> ra = a, rb = b;
    int i = 0, j = 0;
    while (true) {
      const double q = std::min(ra[i], rb[j]);
      x(i, j) = q;
      basis.push_back({i, j});
      ra[i] -= q;
      rb[j] -= q;
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1) {
        ++j;
      } else if (j == n - 1) {
        ++i;
      } else if (ra[i] <= rb[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  double max_cost = 0.0;
  for (double c : cost.data()) max_cost = std::max(max_cost, std::abs(c));
  const double tol = 1e-12 * std::max(1.0, max_cost);

  const int nodes = m + n;
  std::vector<double> pot(static_cast<std::size_t>(nodes));
  std::vector<std::vector<std::pair<int, int>>> tree(static_cast<std::size_t>(nodes));
  std::vector<int> parent(static_cast<std::size_t>(nodes));
  std::vector<int> parent_cell(static_cast<std::size_t>(nodes));
  std::vector<char> seen(static_cast<std::size_t>(nodes));

  const long max_pivots = 50L * nodes * nodes + 1000;
  int degenerate_streak = 0;

  for (;;) {
    for (auto& t : tree) t.clear();
    for (int k = 0; k < static_cast<int>(basis.size()); ++k) {
      tree[basis[k].row].emplace_back(m + basis[k].col, k);
      tree[m + basis[k].col].emplace_back(basis[k].row, k);
    }

    // Potentials: u_i + v_j = c_ij on basic cells, u_0 = 0.
    std::fill(seen.begin(), seen.end(), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    pot[0] = 0.0;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (auto [w, k] : tree[v]) {
        if (seen[w]) continue;
        seen[w] = 1;
        pot[w] = cost(basis[k].row, basis[k].col) - pot[v];
        queue.push_back(w);
      }
    }

    // Entering cell. Dantzig's rule normally; Bland's rule (first improving
    // cell) after a run of degenerate pivots, which rules out cycling.
    const bool bland = degenerate_streak > nodes;
    int ei = -1, ej = -1;
    double best = -tol;
    for (int i = 0; i < m && !(bland && ei >= 0); ++i) {
      for (int j = 0; j < n; ++j) {
        const double r = cost(i, j) - pot[i] - pot[m + j];
        if (r < best) {
          best = r;
          ei = i;
          ej = j;
          if (bland) break;
        }
      }
    }
    if (ei < 0) break;
    if (++result.pivots > max_pivots) throw Error("solve_transportation: pivot limit exceeded");

    // Tree path from row ei to column ej.
    std::fill(seen.begin(), seen.end(), 0);
    queue.assign(1, ei);
    seen[ei] = 1;
    parent[ei] = -1;
    const int target = m + ej;
    while (!queue.empty() && !seen[target]) {
      int v = queue.front();
      queue.pop_front();
      for (auto [w, k] : tree[v]) {
        if (seen[w]) continue;
        seen[w] = 1;
        parent[w] = v;
        parent_cell[w] = k;
        queue.push_back(w);
      }
    }

    // Walking back from the column, cells alternate -, +, -, ... and the
    // entering cell is +. The path has odd length so it ends on a minus cell.
    std::vector<int> cycle;
    for (int v = target; parent[v] >= 0; v = parent[v]) cycle.push_back(parent_cell[v]);

    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (std::size_t s = 0; s < cycle.size(); s += 2) {
      const Cell c = basis[cycle[s]];
      const double f = x(c.row, c.col);
      const bool better = f < theta ||
                          (bland && f == theta && leave >= 0 &&
                           c.row * n + c.col < basis[leave].row * n + basis[leave].col);
      if (better) {
        theta = f;
        leave = cycle[s];
      }
    }

    degenerate_streak = theta > 0.0 ? 0 : degenerate_streak + 1;
    x(ei, ej) += theta;
    for (std::size_t s = 0; s < cycle.size(); ++s) {
      const Cell c = basis[cycle[s]];
      if (s % 2 == 0) {
        x(c.row, c.col) -= theta;
      } else {
        x(c.row, c.col) += theta;
      }
    }
    const Cell out = basis[leave];
    x(out.row, out.col) = 0.0;
    basis[leave] = {ei, ej};
  }

  for (const Cell& c : basis) result.cost += x(c.row, c.col) * cost(c.row, c.col);
  return result;
}

namespace {

bool lexicographically_greater(const NodeDistribution& p, const NodeDistribution& q) {
  return std::lexicographical_compare(q.mass.begin(), q.mass.end(), p.mass.begin(),
                                      p.mass.end());
}

void check_dimensions(const NodeDistribution& p, const NodeDistribution& q,
                      const graph::CostMatrix& cm) {
  if (p.size() != cm.size() || q.size() != cm.size()) {
    throw Error("distribution length does not match the cost matrix (" +
                std::to_string(p.size()) + ", " + std::to_string(q.size()) + " vs " +
                std::to_string(cm.size()) + ")");
  }
}

}  // namespace

TransportPlan wasserstein(const NodeDistribution& p, const NodeDistribution& q,
                          const graph::CostMatrix& cm) {
  check_dimensions(p, q, cm);
  check_distribution(p, "wasserstein: P");
  check_distribution(q, "wasserstein: Q");

  // Solve in a canonical orientation so W(P,Q) and W(Q,P) are bit-identical.
  const bool swapped = lexicographically_greater(p, q);
  const NodeDistribution& src = swapped ? q : p;
  const NodeDistribution& dst = swapped ? p : q;

  std::vector<int> rows, cols;
  std::vector<double> supply, demand;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] > 0.0) {
      rows.push_back(static_cast<int>(i));
      supply.push_back(src[i]);
    }
  }
  for (std::size_t j = 0; j < dst.size(); ++j) {
    if (dst[j] > 0.0) {
      cols.push_back(static_cast<int>(j));
      demand.push_back(dst[j]);
    }
  }
  Matrix<double> sub(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = cm(rows[i], cols[j]);
  }
  auto solved = solve_transportation(supply, demand, sub);

  const std::size_t n = cm.size();
  TransportPlan out{Matrix<double>(n, n, 0.0), solved.cost};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double f = solved.flow(i, j);
      if (f == 0.0) continue;
      if (swapped) {
        out.plan(cols[j], rows[i]) = f;
      } else {
        out.plan(rows[i], cols[j]) = f;
      }
    }
  }
  return out;
}

double ntd(const NodeDistribution& p, const NodeDistribution& q, const graph::CostMatrix& cm) {
  if (cm.diameter <= 0) throw Error("ntd: graph diameter is zero");
  return wasserstein(p, q, cm).cost / cm.diameter;
}

std::vector<double> minmax_scale(std::span<const double> x, double floor) {
  if (x.empty()) throw Error("minmax_scale: empty input");
  if (!(floor >= 0.0 && floor <= 1.0)) throw Error("minmax_scale: floor must lie in [0, 1]");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> out(x.size(), 1.0);
  if (hi == lo) return out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (x[i] - lo) * (1.0 - floor) / (hi - lo) + floor;
  }
  return out;
}

std::vector<double> combine_weights(const WeightingConfig& w) {
  if (w.features.empty()) throw Error("combine_weights: no features");
  if (w.features.size() != w.coefficients.size()) {
    throw Error("combine_weights: feature and coefficient counts differ");
  }
  if (!(w.floor >= 0.0 && w.floor <= 1.0)) throw Error("combine_weights: floor must lie in [0, 1]");
  const std::size_t n = w.features.front().size();
  std::vector<double> sum(n, 0.0);
  for (std::size_t i = 0; i < w.features.size(); ++i) {
    if (w.features[i].size() != n) throw Error("combine_weights: feature length mismatch");
    const double c = w.coefficients[i];
    if (!(c >= -1.0 && c <= 1.0)) throw Error("combine_weights: coefficient outside [-1, 1]");
    auto scaled = minmax_scale(w.features[i], w.floor);
    for (std::size_t v = 0; v < n; ++v) sum[v] += c * scaled[v];
  }
  return minmax_scale(sum, w.floor);
}

namespace {

NodeDistribution reweight(const NodeDistribution& x, std::span<const double> w, const char* what) {
  std::vector<double> out(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = w[i] * x[i];
    total += out[i];
  }
  if (!(total > 0.0)) throw Error(std::string(what) + ": weighted mass is zero");
  for (double& v : out) v /= total;
  return NodeDistribution(std::move(out));
}

}  // namespace

double ntd_weighted(const NodeDistribution& p, const NodeDistribution& q,
                    const graph::CostMatrix& cm, std::span<const double> weights) {
  check_dimensions(p, q, cm);
  if (weights.size() != cm.size()) throw Error("ntd_weighted: weight vector length mismatch");
  check_distribution(p, "ntd_weighted: P");
  check_distribution(q, "ntd_weighted: Q");
  // Uniform weights leave normalized inputs unchanged.
  if (std::adjacent_find(weights.begin(), weights.end(), std::not_equal_to<>()) == weights.end()) {
    return ntd(p, q, cm);
  }
  return ntd(reweight(p, weights, "ntd_weighted: P"), reweight(q, weights, "ntd_weighted: Q"), cm);
}

double ntd_weighted(const NodeDistribution& p, const NodeDistribution& q,
                    const graph::CostMatrix& cm, const WeightingConfig& w) {
  return ntd_weighted(p, q, cm, combine_weights(w));
}

}  // namespace hotdesk::transport
