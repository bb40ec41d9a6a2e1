// Adaptive weighted fuzzy C-means over node QoS features.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qqmr/types.hpp"

namespace qqmr {

inline constexpr std::size_t kFeatureCount = 4;
inline constexpr std::size_t kClusterCount = kClassCount;

/// (delay, free buffer, error rate, residual energy)
using FeatureVector = std::array<double, kFeatureCount>;
using Centers = std::array<FeatureVector, kClusterCount>;
using WeightMatrix = std::array<FeatureVector, kClusterCount>;

/// inverse: lower is better; direct: higher is better.
enum class Orientation : std::uint8_t { inverse, direct };
using OrientationMap = std::array<Orientation, kFeatureCount>;

inline constexpr OrientationMap kQosOrientation{
    Orientation::inverse, Orientation::direct, Orientation::inverse, Orientation::direct};

/// Rows: emergency, error-sensitive, normal cluster.
inline constexpr WeightMatrix kInitialWeights{{
    {0.5, 0.5, 0.0, 0.0},
    {0.0, 0.0, 1.0, 0.0},
    {0.0, 0.0, 0.0, 1.0},
}};

struct WfcmParams {
  double m = 2.0;
  std::uint32_t max_iter = 100;
  double tol = 1e-5;
  double learn_min = 0.05;
  double learn_max = 0.3;
  std::uint64_t seed = 0;
  WeightMatrix initial_weights = kInitialWeights;
  OrientationMap orientation = kQosOrientation;
};

struct ClusterModel {
  Centers centers{};
  WeightMatrix weights{};
  std::vector<Memberships> memberships;
  double m = 2.0;
  std::vector<double> objective_trace;
  std::uint32_t iterations = 0;
  bool converged = false;
};

/// sum_j w_j (x_j - v_j)^2
double weighted_distance(const FeatureVector& x, const FeatureVector& v, const FeatureVector& w);

/// u_ik = 1 / sum_h (d_ik / d_ih)^(2/(m-1)) with d = sqrt(D) the weighted
/// distance. A node at zero distance from one or more centers splits its
/// membership equally among those.
std::vector<Memberships> update_memberships(std::span<const FeatureVector> x,
                                            const Centers& centers, const WeightMatrix& weights,
                                            double m);

/// v_kj = sum_i u_ik^m x_ij / sum_i u_ik^m. A cluster with no membership mass
/// keeps its previous center.
Centers update_centers(std::span<const FeatureVector> x, std::span<const Memberships> u, double m,
                       const Centers& previous);

/// Per-cluster learning coefficients learn_min + (learn_max - learn_min) * w_init.
WeightMatrix learning_coefficients(const WeightMatrix& initial, double learn_min,
                                   double learn_max);

/// Importance of each feature from the cluster's weighted feature means,
/// normalized to sum to one. Flat means give uniform weights.
WeightMatrix dynamic_weights(const Centers& cluster_means, const OrientationMap& orientation);

/// Feature-weight adaptation: cluster means, importance, dynamic weights,
/// blend with the current weights, renormalize.
WeightMatrix update_feature_weights(std::span<const FeatureVector> x,
                                    std::span<const Memberships> u, const WeightMatrix& current,
                                    const WfcmParams& params);

/// J = sum_i sum_k u_ik^m D_ik
double objective(std::span<const FeatureVector> x, std::span<const Memberships> u,
                 const Centers& centers, const WeightMatrix& weights, double m);

/// Full clustering run from seeded initial centers (three distinct rows of
/// x). Throws std::invalid_argument for fewer than three rows or m <= 1.
ClusterModel run_wfcm(std::span<const FeatureVector> x, const WfcmParams& params);

/// Min-max scales each column to [0, 1]. Constant columns and NaN entries
/// (no measurement yet) map to 0.5.
std::vector<FeatureVector> normalize_features(std::span<const FeatureVector> raw);

}  // namespace qqmr
