#include "hotdesk/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hotdesk/error.hpp"

namespace hotdesk::sinkhorn {

using transport::NodeDistribution;

SinkhornParams default_params(const graph::CostMatrix& cm) {
  SinkhornParams p;
  p.lambda = 0.05 * cm.diameter;
  return p;
}

Matrix<double> kernel_matrix(const graph::CostMatrix& cm, double lambda) {
  if (!(lambda > 0.0)) throw Error("kernel_matrix: lambda must be positive");
  const std::size_t n = cm.size();
  Matrix<double> k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k(i, j) = std::exp(-cm.dist(i, j) / lambda);
  }
  return k;
}

NodeDistribution smooth(const NodeDistribution& p) {
  const double n = static_cast<double>(p.size());
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = (1.0 - kSmoothing) * p[i] + kSmoothing / n;
  return NodeDistribution(std::move(out));
}

namespace {

// log(sum_k exp(x_k)) over a strided view, stable for very negative inputs.
template <typename Fn>
double log_sum_exp(std::size_t n, Fn&& term) {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) hi = std::max(hi, term(k));
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += std::exp(term(k) - hi);
  return hi + std::log(s);
}

void validate(const NodeDistribution& p, const NodeDistribution& q, const graph::CostMatrix& cm,
              const SinkhornParams& params) {
  if (p.size() != cm.size() || q.size() != cm.size()) {
    throw Error("sinkhorn: distribution length does not match the cost matrix");
  }
  transport::check_distribution(p, "sinkhorn: P");
  transport::check_distribution(q, "sinkhorn: Q");
  if (cm.diameter <= 0) throw Error("sinkhorn: graph diameter is zero");
  if (!(params.lambda > 0.0)) throw Error("sinkhorn: lambda must be positive");
  if (params.max_iters < 1) throw Error("sinkhorn: max_iters must be at least 1");
  if (!(params.convergence_tol > 0.0)) throw Error("sinkhorn: convergence_tol must be positive");
}

}  // namespace

SinkhornResult sinkhorn_plan(const NodeDistribution& p, const NodeDistribution& q,
                             const graph::CostMatrix& cm, const SinkhornParams& params) {
  validate(p, q, cm, params);
  const std::size_t n = cm.size();
  const double lambda = params.lambda;
  const NodeDistribution ps = smooth(p);
  const NodeDistribution qs = smooth(q);

  // Scaled costs C / lambda; the iteration runs on log u and log v.
  Matrix<double> c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) c(i, j) = cm.dist(i, j) / lambda;
  }
  std::vector<double> log_p(n), log_q(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_p[i] = std::log(ps[i]);
    log_q[i] = std::log(qs[i]);
  }

  SinkhornResult r;
  r.log_u.assign(n, 0.0);
  r.log_v.assign(n, 0.0);
  auto& lu = r.log_u;
  auto& lv = r.log_v;

  // row_lse[i] = log (K v)_i
  std::vector<double> row_lse(n);
  auto update_row_lse = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      row_lse[i] = log_sum_exp(n, [&](std::size_t j) { return lv[j] - c(i, j); });
    }
  };
  update_row_lse();

  for (int it = 1; it <= params.max_iters; ++it) {
    // u = P / (K v)
    for (std::size_t i = 0; i < n; ++i) lu[i] = log_p[i] - row_lse[i];
    // v = Q / (K^T u); columns now match Q up to rounding.
    for (std::size_t j = 0; j < n; ++j) {
      lv[j] = log_q[j] - log_sum_exp(n, [&](std::size_t i) { return lu[i] - c(i, j); });
    }
    update_row_lse();

    double violation = 0.0;
    for (std::size_t i = 0; i < n; ++i) violation += std::abs(std::exp(lu[i] + row_lse[i]) - ps[i]);
    if (!std::isfinite(violation)) {
      throw NumericalError("sinkhorn: iteration produced a non-finite value at step " +
                           std::to_string(it));
    }
    r.iterations_used = it;
    r.marginal_violation = violation;
    if (params.record_history) r.violation_history.push_back(violation);
    if (violation <= params.convergence_tol) {
      r.converged = true;
      break;
    }
  }

  r.plan = Matrix<double>(n, n);
  double cost = 0.0, plan_log_plan = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double log_mu = lu[i] + lv[j] - c(i, j);
      const double mu = std::exp(log_mu);
      r.plan(i, j) = mu;
      cost += mu * cm.dist(i, j);
      plan_log_plan += mu * log_mu;
    }
  }
  r.entropy = -plan_log_plan;
  r.transport_cost = cost / cm.diameter;
  r.value = (cost - lambda * r.entropy) / cm.diameter;
  if (!std::isfinite(r.value)) throw NumericalError("sinkhorn: non-finite loss value");
  return r;
}

double ntd_loss(const NodeDistribution& p, const NodeDistribution& q, const graph::CostMatrix& cm,
                const SinkhornParams& params) {
  return sinkhorn_plan(p, q, cm, params).value;
}

std::vector<double> ntd_loss_grad(const NodeDistribution& p, const NodeDistribution& q,
                                  const graph::CostMatrix& cm, const SinkhornParams& params) {
  auto r = sinkhorn_plan(p, q, cm, params);
  if (!r.converged) {
    throw Error("ntd_loss_grad: Sinkhorn did not converge (violation " +
                std::to_string(r.marginal_violation) + " after " +
                std::to_string(r.iterations_used) + " iterations)");
  }
  // dLoss/dP_i = lambda * log u_i / diameter up to an additive constant;
  // smoothing scales P by (1 - eps).
  const std::size_t n = r.log_u.size();
  std::vector<double> grad(n);
  for (std::size_t i = 0; i < n; ++i) grad[i] = params.lambda * r.log_u[i];
  const double mean = std::accumulate(grad.begin(), grad.end(), 0.0) / static_cast<double>(n);
  const double scale = (1.0 - kSmoothing) / cm.diameter;
  for (double& g : grad) g = (g - mean) * scale;
  return grad;
}

}  // namespace hotdesk::sinkhorn
