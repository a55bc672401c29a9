#include "dsetdist/geometric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dsetdist/util.hpp"

namespace dsetdist {

namespace {

struct Ordered {
  const Matrix& x;
  const Matrix& y;
};

Ordered canonical(const Dataset& a, const Dataset& b) {
  require_same_cols(a, b);
  if (canonical_less(b, a)) return {b.data(), a.data()};
  return {a.data(), b.data()};
}

template <typename PairFn>
double mean_over_pairs(const Matrix& x, const Matrix& y, PairFn&& fn) {
  std::vector<double> rows(static_cast<std::size_t>(x.rows()));
  parallel_for(rows.size(), [&](std::size_t j) {
    double s = 0.0;
    const auto xj = x.row(static_cast<Eigen::Index>(j));
    for (Eigen::Index k = 0; k < y.rows(); ++k) s += fn(xj, y.row(k));
    rows[j] = s;
  });
  return std::accumulate(rows.begin(), rows.end(), 0.0) /
         (static_cast<double>(x.rows()) * static_cast<double>(y.rows()));
}

double euclid(const auto& u, const auto& v) { return (u - v).norm(); }

// Sequential row accumulation; shared with the k-means mean update so that
// k = 1 clustering reproduces the centroid distance bit for bit.
Eigen::RowVectorXd row_mean(const Matrix& x) {
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) sum += x.row(i);
  return sum / static_cast<double>(x.rows());
}

std::vector<int> assign(const Matrix& points, const Matrix& centroids, std::vector<double>& sq_dist) {
  std::vector<int> out(static_cast<std::size_t>(points.rows()));
  sq_dist.assign(out.size(), 0.0);
  parallel_for(out.size(), [&](std::size_t i) {
    const auto p = points.row(static_cast<Eigen::Index>(i));
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (p - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    out[i] = arg;
    sq_dist[i] = best;
  });
  return out;
}

Matrix seed_plus_plus(const Matrix& points, int k, Rng& rng) {
  const auto m = static_cast<std::size_t>(points.rows());
  Matrix centroids(k, points.cols());
  std::vector<bool> chosen(m, false);
  const std::size_t first = rng.index(m);
  centroids.row(0) = points.row(static_cast<Eigen::Index>(first));
  chosen[first] = true;
  std::vector<double> d2(m);
  for (std::size_t i = 0; i < m; ++i) {
    d2[i] = (points.row(static_cast<Eigen::Index>(i)) - centroids.row(0)).squaredNorm();
  }
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = m;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double cumulative = 0.0;
      std::size_t last_positive = m;
      for (std::size_t i = 0; i < m; ++i) {
        if (d2[i] <= 0.0) continue;
        last_positive = i;
        cumulative += d2[i];
        if (cumulative > r) {
          pick = i;
          break;
        }
      }
      if (pick == m) pick = last_positive;
    } else {
      // Every point coincides with a centroid: take the first unused row.
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
      if (pick == m) pick = 0;
    }
    chosen[pick] = true;
    centroids.row(c) = points.row(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < m; ++i) {
      d2[i] = std::min(d2[i], (points.row(static_cast<Eigen::Index>(i)) - centroids.row(c)).squaredNorm());
    }
  }
  return centroids;
}

void recompute_means(const Matrix& points, const std::vector<int>& assignments, Matrix& centroids,
                     std::vector<Eigen::Index>& counts) {
  const auto k = centroids.rows();
  Matrix sums = Matrix::Zero(k, points.cols());
  counts.assign(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int c = assignments[static_cast<std::size_t>(i)];
    sums.row(c) += points.row(i);
    ++counts[static_cast<std::size_t>(c)];
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) {
      centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
  }
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, KMeansOptions options) {
  if (k < 1) throw ValidationError("k must be positive");
  if (points.rows() < k) {
    throw InsufficientDataError("k-means needs at least k=" + std::to_string(k) +
                                " points but the dataset has " + std::to_string(points.rows()) +
                                "; lower k");
  }
  Rng rng(seed);
  KMeansResult out;
  out.centroids = seed_plus_plus(points, k, rng);
  std::vector<double> sq;
  std::vector<Eigen::Index> counts;
  for (int it = 0; it < options.max_iterations; ++it) {
    std::vector<int> assignments = assign(points, out.centroids, sq);
    out.inertia_history.push_back(std::accumulate(sq.begin(), sq.end(), 0.0));
    out.iterations = it + 1;
    const bool stable = assignments == out.assignments;
    out.assignments = std::move(assignments);
    if (stable) break;

    Matrix next = out.centroids;
    recompute_means(points, out.assignments, next, counts);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      // Empty cluster: move it to the point worst served by the current centroids.
      const auto far = static_cast<Eigen::Index>(std::max_element(sq.begin(), sq.end()) - sq.begin());
      next.row(c) = points.row(far);
      sq[static_cast<std::size_t>(far)] = 0.0;
    }
    const double shift = (next - out.centroids).rowwise().norm().maxCoeff();
    out.centroids = std::move(next);
    if (shift < options.tolerance) {
      out.assignments = assign(points, out.centroids, sq);
      break;
    }
  }
  // Centroids are the means of the reported assignments.
  recompute_means(points, out.assignments, out.centroids, counts);
  out.inertia = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out.inertia += (points.row(i) - out.centroids.row(out.assignments[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return out;
}

double pairwise_euclidean(const Dataset& a, const Dataset& b) {
  const auto [x, y] = canonical(a, b);
  return mean_over_pairs(x, y, [](const auto& u, const auto& v) { return euclid(u, v); });
}

double centroid_euclidean(const Dataset& a, const Dataset& b) {
  const auto [x, y] = canonical(a, b);
  return (row_mean(x) - row_mean(y)).norm();
}

double cluster_euclidean(const Dataset& a, const Dataset& b, int k, std::uint64_t seed) {
  const auto [x, y] = canonical(a, b);
  const KMeansResult cx = kmeans(x, k, seed);
  const KMeansResult cy = kmeans(y, k, seed);
  return mean_over_pairs(cx.centroids, cy.centroids,
                         [](const auto& u, const auto& v) { return euclid(u, v); });
}

double cosine_distance(const Dataset& a, const Dataset& b) {
  const auto [x, y] = canonical(a, b);
  const Eigen::VectorXd nx = x.rowwise().norm();
  const Eigen::VectorXd ny = y.rowwise().norm();
  std::vector<double> rows(static_cast<std::size_t>(x.rows()));
  parallel_for(rows.size(), [&](std::size_t j) {
    const auto jj = static_cast<Eigen::Index>(j);
    double s = 0.0;
    for (Eigen::Index k = 0; k < y.rows(); ++k) {
      if (nx(jj) == 0.0 || ny(k) == 0.0) {
        s += 1.0;
        continue;
      }
      const double c = std::clamp(x.row(jj).dot(y.row(k)) / (nx(jj) * ny(k)), -1.0, 1.0);
      s += 1.0 - c;
    }
    rows[j] = s;
  });
  return std::accumulate(rows.begin(), rows.end(), 0.0) /
         (static_cast<double>(x.rows()) * static_cast<double>(y.rows()));
}

}  // namespace dsetdist
