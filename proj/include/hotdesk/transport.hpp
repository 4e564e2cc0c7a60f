#pragma once

#include <span>
#include <vector>

#include "hotdesk/graph.hpp"
#include "hotdesk/matrix.hpp"

namespace hotdesk::transport {

/// Probability mass per node id.
struct NodeDistribution {
  std::vector<double> mass;

  NodeDistribution() = default;
  explicit NodeDistribution(std::vector<double> m) : mass(std::move(m)) {}

  std::size_t size() const { return mass.size(); }
  double operator[](std::size_t i) const { return mass[i]; }
  bool operator==(const NodeDistribution&) const = default;
};

inline constexpr double kNormalizationTol = 1e-9;
inline constexpr double kMarginalTol = 1e-7;

/// Divides by the total. Throws Error for negative entries or zero mass.
NodeDistribution normalize(std::span<const double> raw);

/// Throws Error unless every entry is finite, non-negative and the total is
/// 1 within kNormalizationTol.
void check_distribution(const NodeDistribution& p, const char* what);

/// A delta on one node.
NodeDistribution point_mass(std::size_t n, graph::NodeId v);

struct TransportPlan {
  Matrix<double> plan;
  double cost = 0.0;
};

/// Balanced transportation problem on an arbitrary cost table. Solved with
/// the transportation simplex (MODI potentials, stepping-stone pivots).
/// supply and demand must be positive and carry equal totals.
struct TransportationResult {
  Matrix<double> flow;  // supply.size() x demand.size()
  double cost = 0.0;
  int pivots = 0;
};
TransportationResult solve_transportation(std::span<const double> supply,
                                          std::span<const double> demand,
                                          const Matrix<double>& cost);

/// Exact optimal transport between P and Q under hop-count ground cost.
/// The problem is restricted to the supports of P and Q.
TransportPlan wasserstein(const NodeDistribution& p, const NodeDistribution& q,
                          const graph::CostMatrix& cm);

/// Wasserstein cost divided by the diameter; in [0, 1].
double ntd(const NodeDistribution& p, const NodeDistribution& q, const graph::CostMatrix& cm);

/// Affine rescale onto [floor, 1]. A constant input maps to all ones.
std::vector<double> minmax_scale(std::span<const double> x, double floor);

struct WeightingConfig {
  std::vector<std::vector<double>> features;
  std::vector<double> coefficients;
  double floor = 0.1;
};

/// Composite node weight in [floor, 1]:
/// minmax(sum_i c_i * minmax(x_i, f), f).
std::vector<double> combine_weights(const WeightingConfig& w);

/// Reweights both inputs by combine_weights(w), renormalizes, then ntd.
double ntd_weighted(const NodeDistribution& p, const NodeDistribution& q,
                    const graph::CostMatrix& cm, const WeightingConfig& w);

/// Same, with a precomputed weight vector.
double ntd_weighted(const NodeDistribution& p, const NodeDistribution& q,
                    const graph::CostMatrix& cm, std::span<const double> weights);

}  // namespace hotdesk::transport
