#pragma once

#include <cstdint>
#include <vector>

#include "dsetdist/core.hpp"

namespace dsetdist {

struct KMeansResult {
  Matrix centroids;                     // k x N
  std::vector<int> assignments;         // one per row, in [0, k)
  double inertia = 0.0;                 // sum of squared distances to assigned centroid
  std::vector<double> inertia_history;  // after each Lloyd assignment step
  int iterations = 0;
};

struct KMeansOptions {
  int max_iterations = 300;
  double tolerance = 1e-6;  // max centroid shift
};

/// k-means++ seeding followed by Lloyd iterations. Empty clusters are reseeded
/// at the point farthest from its nearest centroid.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, KMeansOptions options = {});

/// Mean over all cross pairs of ||x_j - y_k||.
double pairwise_euclidean(const Dataset& a, const Dataset& b);

double centroid_euclidean(const Dataset& a, const Dataset& b);

/// Mean distance between all cross pairs of k-means centroids. Throws
/// InsufficientDataError when either dataset has fewer than k rows.
double cluster_euclidean(const Dataset& a, const Dataset& b, int k = 3, std::uint64_t seed = 0);

/// Mean over cross pairs of (1 - cosine similarity); zero-norm points count as 1.
double cosine_distance(const Dataset& a, const Dataset& b);

}  // namespace dsetdist
