#include "qqmr/wfcm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "qqmr/rng.hpp"

namespace qqmr {

double weighted_distance(const FeatureVector& x, const FeatureVector& v, const FeatureVector& w) {
  double d = 0.0;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    const double diff = x[j] - v[j];
    d += w[j] * diff * diff;
  }
  return d;
}

std::vector<Memberships> update_memberships(std::span<const FeatureVector> x,
                                            const Centers& centers, const WeightMatrix& weights,
                                            double m) {
  if (!(m > 1.0)) throw std::invalid_argument("fuzziness m must be > 1");
  // D is a squared distance, so (d_ik/d_ih)^(2/(m-1)) = (D_ik/D_ih)^(1/(m-1)).
  const double exponent = 1.0 / (m - 1.0);
  std::vector<Memberships> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::array<double, kClusterCount> d{};
    std::size_t zeros = 0;
    for (std::size_t k = 0; k < kClusterCount; ++k) {
      d[k] = weighted_distance(x[i], centers[k], weights[k]);
      if (d[k] <= 0.0) ++zeros;
    }
    if (zeros > 0) {
      for (std::size_t k = 0; k < kClusterCount; ++k) {
        u[i][k] = d[k] <= 0.0 ? 1.0 / static_cast<double>(zeros) : 0.0;
      }
      continue;
    }
    for (std::size_t k = 0; k < kClusterCount; ++k) {
      double sum = 0.0;
      for (std::size_t h = 0; h < kClusterCount; ++h) sum += std::pow(d[k] / d[h], exponent);
      u[i][k] = 1.0 / sum;
    }
  }
  return u;
}

Centers update_centers(std::span<const FeatureVector> x, std::span<const Memberships> u, double m,
                       const Centers& previous) {
  Centers out{};
  for (std::size_t k = 0; k < kClusterCount; ++k) {
    double mass = 0.0;
    FeatureVector acc{};
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double w = std::pow(u[i][k], m);
      mass += w;
      for (std::size_t j = 0; j < kFeatureCount; ++j) acc[j] += w * x[i][j];
    }
    if (mass <= 0.0) {
      out[k] = previous[k];
      continue;
    }
    for (std::size_t j = 0; j < kFeatureCount; ++j) out[k][j] = acc[j] / mass;
  }
  return out;
}

WeightMatrix learning_coefficients(const WeightMatrix& initial, double learn_min,
                                   double learn_max) {
  WeightMatrix out{};
  for (std::size_t k = 0; k < kClusterCount; ++k) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      out[k][j] = learn_min + (learn_max - learn_min) * initial[k][j];
    }
  }
  return out;
}

WeightMatrix dynamic_weights(const Centers& cluster_means, const OrientationMap& orientation) {
  WeightMatrix out{};
  for (std::size_t k = 0; k < kClusterCount; ++k) {
    const auto& mean = cluster_means[k];
    const auto [lo_it, hi_it] = std::minmax_element(mean.begin(), mean.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    FeatureVector mu{};
    if (hi - lo <= 0.0) {
      mu.fill(1.0);
    } else {
      for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const double r = (mean[j] - lo) / (hi - lo);
        mu[j] = orientation[j] == Orientation::inverse ? 1.0 - r : r;
      }
    }
    const double sum = std::accumulate(mu.begin(), mu.end(), 0.0);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      out[k][j] = sum > 0.0 ? mu[j] / sum : 1.0 / static_cast<double>(kFeatureCount);
    }
  }
  return out;
}

WeightMatrix update_feature_weights(std::span<const FeatureVector> x,
                                    std::span<const Memberships> u, const WeightMatrix& current,
                                    const WfcmParams& params) {
  Centers flat{};
  for (auto& row : flat) row.fill(0.5);
  const Centers means = update_centers(x, u, params.m, flat);
  const WeightMatrix dyn = dynamic_weights(means, params.orientation);
  const WeightMatrix learn =
      learning_coefficients(params.initial_weights, params.learn_min, params.learn_max);
  WeightMatrix out{};
  for (std::size_t k = 0; k < kClusterCount; ++k) {
    FeatureVector blended{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      blended[j] = learn[k][j] * current[k][j] + (1.0 - learn[k][j]) * dyn[k][j];
    }
    const double sum = std::accumulate(blended.begin(), blended.end(), 0.0);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      out[k][j] = sum > 0.0 ? blended[j] / sum : 1.0 / static_cast<double>(kFeatureCount);
    }
  }
  return out;
}

double objective(std::span<const FeatureVector> x, std::span<const Memberships> u,
                 const Centers& centers, const WeightMatrix& weights, double m) {
  double j = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = 0; k < kClusterCount; ++k) {
      j += std::pow(u[i][k], m) * weighted_distance(x[i], centers[k], weights[k]);
    }
  }
  return j;
}

ClusterModel run_wfcm(std::span<const FeatureVector> x, const WfcmParams& params) {
  if (x.size() < kClusterCount) throw std::invalid_argument("clustering needs at least 3 nodes");
  if (!(params.m > 1.0)) throw std::invalid_argument("fuzziness m must be > 1");

  Rng rng{params.seed};
  std::vector<std::size_t> rows(x.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  for (std::size_t k = 0; k < kClusterCount; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, rows.size() - 1);
    std::swap(rows[k], rows[pick(rng)]);
  }

  ClusterModel model;
  model.m = params.m;
  model.weights = params.initial_weights;
  for (std::size_t k = 0; k < kClusterCount; ++k) model.centers[k] = x[rows[k]];

  std::vector<Memberships> previous;
  for (std::uint32_t it = 0; it < params.max_iter; ++it) {
    std::vector<Memberships> u = update_memberships(x, model.centers, model.weights, params.m);
    model.centers = update_centers(x, u, params.m, model.centers);
    model.weights = update_feature_weights(x, u, model.weights, params);
    model.objective_trace.push_back(objective(x, u, model.centers, model.weights, params.m));
    model.iterations = it + 1;

    double change = std::numeric_limits<double>::infinity();
    if (!previous.empty()) {
      change = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t k = 0; k < kClusterCount; ++k) {
          change = std::max(change, std::abs(u[i][k] - previous[i][k]));
        }
      }
    }
    previous = std::move(u);
    if (change < params.tol) {
      model.converged = true;
      break;
    }
  }
  model.memberships = std::move(previous);
  return model;
}

std::vector<FeatureVector> normalize_features(std::span<const FeatureVector> raw) {
  std::vector<FeatureVector> out(raw.begin(), raw.end());
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : raw) {
      if (std::isnan(row[j])) continue;
      lo = std::min(lo, row[j]);
      hi = std::max(hi, row[j]);
    }
    for (auto& row : out) {
      if (std::isnan(row[j]) || !(hi > lo)) {
        row[j] = 0.5;
      } else {
        row[j] = (row[j] - lo) / (hi - lo);
      }
    }
  }
  return out;
}

}  // namespace qqmr
