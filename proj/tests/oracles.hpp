#pragma once
// Test-only reference implementations. Each one takes a deliberately different
// route from the library code it checks.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <vector>

#include <Eigen/Dense>

#include "dsetdist/core.hpp"
#include "dsetdist/util.hpp"

namespace oracle {

using dsetdist::Dataset;
using dsetdist::Matrix;

/// Min-cost transport between two uniform empirical samples, solved as an
/// integer flow (mass Mb per source point, Ma per sink point) with
/// successive shortest augmenting paths.
inline double transport_w1(const std::vector<double>& a, const std::vector<double>& b) {
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  const int src = na + nb;
  const int snk = src + 1;
  const int nv = snk + 1;
  struct Edge {
    int to;
    long cap;
    double cost;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nv));
  auto add = [&](int u, int v, long cap, double cost) {
    adj[static_cast<std::size_t>(u)].push_back(static_cast<int>(edges.size()));
    edges.push_back({v, cap, cost});
    adj[static_cast<std::size_t>(v)].push_back(static_cast<int>(edges.size()));
    edges.push_back({u, 0, -cost});
  };
  for (int i = 0; i < na; ++i) add(src, i, nb, 0.0);
  for (int j = 0; j < nb; ++j) add(na + j, snk, na, 0.0);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) add(i, na + j, static_cast<long>(na) * nb, std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(j)]));
  }
  double total = 0.0;
  long remaining = static_cast<long>(na) * nb;
  while (remaining > 0) {
    // Queue-based Bellman-Ford on the residual graph (negative reverse costs).
    // The slack absorbs rounding so near-zero cycles cannot loop forever.
    std::vector<double> dist(static_cast<std::size_t>(nv), std::numeric_limits<double>::infinity());
    std::vector<int> via(static_cast<std::size_t>(nv), -1);
    std::vector<char> queued(static_cast<std::size_t>(nv), 0);
    std::deque<int> queue{src};
    dist[static_cast<std::size_t>(src)] = 0.0;
    queued[static_cast<std::size_t>(src)] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      queued[static_cast<std::size_t>(u)] = 0;
      for (int e : adj[static_cast<std::size_t>(u)]) {
        const auto& ed = edges[static_cast<std::size_t>(e)];
        if (ed.cap <= 0) continue;
        const double nd = dist[static_cast<std::size_t>(u)] + ed.cost;
        if (nd < dist[static_cast<std::size_t>(ed.to)] - 1e-12) {
          dist[static_cast<std::size_t>(ed.to)] = nd;
          via[static_cast<std::size_t>(ed.to)] = e;
          if (!queued[static_cast<std::size_t>(ed.to)]) {
            queued[static_cast<std::size_t>(ed.to)] = 1;
            queue.push_back(ed.to);
          }
        }
      }
    }
    long push = remaining;
    for (int v = snk; v != src; v = edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)] ^ 1)].to) {
      push = std::min(push, edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)])].cap);
    }
    for (int v = snk; v != src; v = edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)] ^ 1)].to) {
      edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)])].cap -= push;
      edges[static_cast<std::size_t>(via[static_cast<std::size_t>(v)] ^ 1)].cap += push;
    }
    total += static_cast<double>(push) * dist[static_cast<std::size_t>(snk)];
    remaining -= push;
  }
  return total / (static_cast<double>(na) * nb);
}

/// sup |F_a - F_b| evaluated at every pooled sample by counting.
inline double ks_scan(const std::vector<double>& a, const std::vector<double>& b) {
  double best = 0.0;
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  for (double t : pooled) {
    double ca = 0.0;
    double cb = 0.0;
    for (double x : a) ca += x <= t ? 1.0 : 0.0;
    for (double y : b) cb += y <= t ? 1.0 : 0.0;
    best = std::max(best, std::abs(ca / static_cast<double>(a.size()) - cb / static_cast<double>(b.size())));
  }
  return best;
}

inline std::vector<double> column(const Dataset& d, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(d.rows()));
  for (Eigen::Index i = 0; i < d.rows(); ++i) out[static_cast<std::size_t>(i)] = d.data()(i, j);
  return out;
}

inline double dist(const Matrix& x, Eigen::Index i, const Matrix& y, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index f = 0; f < x.cols(); ++f) s += (x(i, f) - y(j, f)) * (x(i, f) - y(j, f));
  return std::sqrt(s);
}

inline double mean_cross_distance(const Matrix& x, const Matrix& y) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.rows(); ++j) s += dist(x, i, y, j);
  }
  return s / static_cast<double>(x.rows() * y.rows());
}

inline double centroid_distance(const Matrix& x, const Matrix& y) {
  double s = 0.0;
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    double mx = 0.0;
    double my = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) mx += x(i, f);
    for (Eigen::Index j = 0; j < y.rows(); ++j) my += y(j, f);
    const double d = mx / static_cast<double>(x.rows()) - my / static_cast<double>(y.rows());
    s += d * d;
  }
  return std::sqrt(s);
}

inline double energy(const Matrix& x, const Matrix& y) {
  return 2.0 * mean_cross_distance(x, y) - mean_cross_distance(x, x) - mean_cross_distance(y, y);
}

/// Median of all unordered pooled pairwise distances, by full sort.
inline double median_pooled_distance(const Matrix& x, const Matrix& y) {
  Matrix p(x.rows() + y.rows(), x.cols());
  p << x, y;
  std::vector<double> d;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < p.rows(); ++j) d.push_back(dist(p, i, p, j));
  }
  std::sort(d.begin(), d.end());
  const std::size_t n = d.size();
  return n % 2 == 1 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
}

inline double rbf_mmd2(const Matrix& x, const Matrix& y) {
  double h = median_pooled_distance(x, y);
  if (h <= 0.0) h = 1.0;
  auto k = [&](const Matrix& u, Eigen::Index i, const Matrix& v, Eigen::Index j) {
    const double d = dist(u, i, v, j);
    return std::exp(-d * d / (2.0 * h * h));
  };
  auto mean_k = [&](const Matrix& u, const Matrix& v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      for (Eigen::Index j = 0; j < v.rows(); ++j) s += k(u, i, v, j);
    }
    return s / static_cast<double>(u.rows() * v.rows());
  };
  return mean_k(x, x) + mean_k(y, y) - 2.0 * mean_k(x, y);
}

/// Triple loop over all datasets and all point pairs carrying each label.
inline std::map<dsetdist::Label, double> penalty_table(const std::vector<Dataset>& group) {
  std::map<dsetdist::Label, double> out;
  for (const auto& p : group) {
    for (const auto& q : group) {
      for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const auto li = (*p.labels())[static_cast<std::size_t>(i)];
        out.try_emplace(li, 0.0);
        for (Eigen::Index j = 0; j < q.rows(); ++j) {
          if ((*q.labels())[static_cast<std::size_t>(j)] != li) continue;
          out[li] = std::max(out[li], dist(p.data(), i, q.data(), j));
        }
      }
    }
  }
  return out;
}

/// Nearest class centroid by exhaustive search, centroids by direct summation.
inline double nearest_centroid_accuracy(const Dataset& source, const Dataset& target) {
  std::map<dsetdist::Label, std::pair<Eigen::RowVectorXd, double>> sums;
  for (Eigen::Index i = 0; i < source.rows(); ++i) {
    auto& [s, n] = sums.try_emplace((*source.labels())[static_cast<std::size_t>(i)],
                                    Eigen::RowVectorXd::Zero(source.cols()), 0.0)
                       .first->second;
    s += source.data().row(i);
    n += 1.0;
  }
  double hits = 0.0;
  for (Eigen::Index i = 0; i < target.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    dsetdist::Label pick = 0;
    for (const auto& [l, sn] : sums) {
      const double d = (target.data().row(i) - sn.first / sn.second).squaredNorm();
      if (d < best) {
        best = d;
        pick = l;
      }
    }
    hits += pick == (*target.labels())[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  }
  return hits / static_cast<double>(target.rows());
}

/// Largest principal angle via Courant-Fischer on a 2-D subspace pair: the
/// max over unit u in span(A) of the min angle to span(B), found on a fine
/// grid of directions and refined by golden-section search.
inline double largest_angle_2d(const Eigen::MatrixXd& qa, const Eigen::MatrixXd& qb) {
  auto angle_to_b = [&](double t) {
    const Eigen::VectorXd u = std::cos(t) * qa.col(0) + std::sin(t) * qa.col(1);
    const double c = std::min(1.0, (qb.transpose() * u).norm());
    return std::acos(c);
  };
  constexpr int kGrid = 20000;
  double best_t = 0.0;
  double best = -1.0;
  for (int g = 0; g < kGrid; ++g) {
    const double t = M_PI * g / kGrid;
    const double v = angle_to_b(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  double lo = best_t - M_PI / kGrid;
  double hi = best_t + M_PI / kGrid;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double m1 = hi - phi * (hi - lo);
    const double m2 = lo + phi * (hi - lo);
    if (angle_to_b(m1) > angle_to_b(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::max(best, angle_to_b(0.5 * (lo + hi)));
}

/// Orthonormal basis by classical Gram-Schmidt.
inline Eigen::MatrixXd gram_schmidt(const Eigen::MatrixXd& v) {
  Eigen::MatrixXd q = v;
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    for (Eigen::Index p = 0; p < c; ++p) q.col(c) -= q.col(p).dot(v.col(c)) * q.col(p);
    q.col(c).normalize();
  }
  return q;
}

inline Matrix random_matrix(dsetdist::Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  }
  return m;
}

/// Random orthogonal matrix from Gram-Schmidt of a Gaussian matrix.
inline Eigen::MatrixXd random_rotation(dsetdist::Rng& rng, Eigen::Index n) {
  return gram_schmidt(random_matrix(rng, n, n));
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

}  // namespace oracle
