#include <limits>

#include "hotdesk/error.hpp"
#include "hotdesk/eval.hpp"
#include "hotdesk/rng.hpp"

namespace hotdesk::eval {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

int nearest(const std::vector<double>& p, const std::vector<std::vector<double>>& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = sq_dist(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed,
                    int max_iters) {
  if (k < 1) throw ConfigError("kmeans: k must be at least 1");
  if (points.size() < static_cast<std::size_t>(k)) {
    throw Error("kmeans: " + std::to_string(points.size()) + " points for " + std::to_string(k) +
                " clusters");
  }
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error("kmeans: points differ in dimension");
  }

  // k-means++ seeding.
  Rng rng(seed);
  KMeansResult r;
  r.centroids.push_back(points[uniform_index(rng, points.size())]);
  std::vector<double> d2(points.size());
  while (r.centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::numeric_limits<double>::infinity();
      for (const auto& c : r.centroids) d2[i] = std::min(d2[i], sq_dist(points[i], c));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = uniform01(rng) * total;
      pick = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (u < d2[i]) {
          pick = i;
          break;
        }
        u -= d2[i];
      }
    } else {
      pick = uniform_index(rng, points.size());
    }
    r.centroids.push_back(points[pick]);
  }

  r.assignment.assign(points.size(), -1);
  for (int it = 1; it <= max_iters; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const int c = nearest(points[i], r.centroids);
      changed = changed || c != r.assignment[i];
      r.assignment[i] = c;
    }
    r.iterations = it;
    if (!changed) break;
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto c = static_cast<std::size_t>(r.assignment[i]);
      ++counts[c];
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[i][d];
    }
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t d = 0; d < dim; ++d) r.centroids[c][d] = sums[c][d] / counts[c];
    }
  }
  r.sizes.assign(static_cast<std::size_t>(k), 0);
  for (int c : r.assignment) ++r.sizes[static_cast<std::size_t>(c)];
  return r;
}

int dominant_branch(const std::vector<double>& centroid, const graph::Network& net) {
  const auto& branch = net.branch_of();
  std::vector<double> mass(static_cast<std::size_t>(net.branch_count()), 0.0);
  for (std::size_t v = 0; v < centroid.size() && v < branch.size(); ++v) {
    if (branch[v] >= 0) mass[static_cast<std::size_t>(branch[v])] += centroid[v];
  }
  int best = -1;
  double best_mass = 0.0;
  for (std::size_t b = 0; b < mass.size(); ++b) {
    if (mass[b] > best_mass) {
      best_mass = mass[b];
      best = static_cast<int>(b);
    }
  }
  return best;
}

HedgingReport hedging_clusters(const std::vector<std::vector<double>>& sr_predictions,
                               const graph::Network& net, int k, std::uint64_t seed) {
  HedgingReport h;
  h.clusters = kmeans(sr_predictions, k, seed);
  for (std::size_t c = 0; c < h.clusters.centroids.size(); ++c) {
    h.branch_labels.push_back(h.clusters.sizes[c] ? dominant_branch(h.clusters.centroids[c], net) : -1);
  }
  return h;
}

}  // namespace hotdesk::eval
