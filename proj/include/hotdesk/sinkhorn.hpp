#pragma once

#include <vector>

#include "hotdesk/graph.hpp"
#include "hotdesk/matrix.hpp"
#include "hotdesk/transport.hpp"

namespace hotdesk::sinkhorn {

struct SinkhornParams {
  double lambda = 0.0;  // <= 0 selects the default, 0.05 * diameter
  int max_iters = 10000;
  double convergence_tol = 1e-8;
  /// Keep the per-iteration marginal violation in the result.
  bool record_history = false;
};

/// Default parameters for a given cost matrix.
SinkhornParams default_params(const graph::CostMatrix& cm);

struct SinkhornResult {
  double value = 0.0;  // regularized loss, already divided by the diameter
  double transport_cost = 0.0;  // <plan, dist> / diameter
  double entropy = 0.0;         // H(plan)
  Matrix<double> plan;
  /// Scalings are kept in log space: plan = diag(exp(log_u)) K diag(exp(log_v)).
  std::vector<double> log_u;
  std::vector<double> log_v;
  int iterations_used = 0;
  bool converged = false;
  double marginal_violation = 0.0;
  std::vector<double> violation_history;
};

/// K[i][j] = exp(-dist[i][j] / lambda). Throws Error for lambda <= 0.
Matrix<double> kernel_matrix(const graph::CostMatrix& cm, double lambda);

/// Mixes with the uniform distribution at weight 1e-9 so every coordinate is
/// positive.
transport::NodeDistribution smooth(const transport::NodeDistribution& p);
inline constexpr double kSmoothing = 1e-9;

/// Log-domain Sinkhorn-Knopp scaling between smoothed P and Q.
SinkhornResult sinkhorn_plan(const transport::NodeDistribution& p,
                             const transport::NodeDistribution& q, const graph::CostMatrix& cm,
                             const SinkhornParams& params);

/// (<plan, dist> - lambda * H(plan)) / diameter.
double ntd_loss(const transport::NodeDistribution& p, const transport::NodeDistribution& q,
                const graph::CostMatrix& cm, const SinkhornParams& params);

/// Gradient of ntd_loss with respect to P, projected onto the tangent space
/// of the simplex (entries sum to zero). Throws Error if Sinkhorn did not
/// converge.
std::vector<double> ntd_loss_grad(const transport::NodeDistribution& p,
                                  const transport::NodeDistribution& q,
                                  const graph::CostMatrix& cm, const SinkhornParams& params);

}  // namespace hotdesk::sinkhorn
