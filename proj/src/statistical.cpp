#include "dsetdist/statistical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsetdist/util.hpp"

namespace dsetdist {

namespace {

template <typename PerBin>
double feature_mean(const JointHistogramPair& h, PerBin&& per_feature) {
  double total = 0.0;
  for (std::size_t f = 0; f < h.features(); ++f) total += per_feature(h.pdf_a[f], h.pdf_b[f]);
  return h.features() == 0 ? 0.0 : total / static_cast<double>(h.features());
}

double kl_terms(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) s += p[k] * std::log(p[k] / q[k]);
  }
  return s;
}

std::vector<double> sorted_column(const Matrix& m, Eigen::Index col) {
  std::vector<double> v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) v[static_cast<std::size_t>(i)] = m(i, col);
  std::sort(v.begin(), v.end());
  return v;
}

template <typename Fn>
std::vector<double> per_feature_sorted(const Dataset& a, const Dataset& b, Fn&& fn) {
  require_same_cols(a, b);
  const bool swap = canonical_less(b, a);
  const Dataset& x = swap ? b : a;
  const Dataset& y = swap ? a : b;
  std::vector<double> out(static_cast<std::size_t>(x.cols()));
  parallel_for(out.size(), [&](std::size_t f) {
    const auto col = static_cast<Eigen::Index>(f);
    out[f] = fn(sorted_column(x.data(), col), sorted_column(y.data(), col));
  });
  return out;
}

/// Mean of ||x_j - y_k|| over all ordered pairs; row sums reduced in order.
double mean_cross_distance(const Matrix& x, const Matrix& y) {
  std::vector<double> rows(static_cast<std::size_t>(x.rows()));
  parallel_for(rows.size(), [&](std::size_t j) {
    double s = 0.0;
    const auto xj = x.row(static_cast<Eigen::Index>(j));
    for (Eigen::Index k = 0; k < y.rows(); ++k) s += (xj - y.row(k)).norm();
    rows[j] = s;
  });
  const double total = std::accumulate(rows.begin(), rows.end(), 0.0);
  return total / (static_cast<double>(x.rows()) * static_cast<double>(y.rows()));
}

double mean_cross_kernel(const Matrix& x, const Matrix& y, double gamma) {
  std::vector<double> rows(static_cast<std::size_t>(x.rows()));
  parallel_for(rows.size(), [&](std::size_t j) {
    double s = 0.0;
    const auto xj = x.row(static_cast<Eigen::Index>(j));
    for (Eigen::Index k = 0; k < y.rows(); ++k) s += std::exp(-gamma * (xj - y.row(k)).squaredNorm());
    rows[j] = s;
  });
  const double total = std::accumulate(rows.begin(), rows.end(), 0.0);
  return total / (static_cast<double>(x.rows()) * static_cast<double>(y.rows()));
}

}  // namespace

FeatureAggregation aggregate(std::vector<double> per_feature,
                             std::optional<std::span<const double>> weights) {
  FeatureAggregation out;
  if (per_feature.empty()) return out;
  if (weights) {
    if (weights->size() != per_feature.size()) {
      throw ShapeError("expected " + std::to_string(per_feature.size()) +
                       " feature weights, got " + std::to_string(weights->size()));
    }
    double total = 0.0;
    for (double w : *weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("feature weights must be non-negative");
      total += w;
    }
    if (!(total > 0.0)) throw ValidationError("feature weights must not all be zero");
    std::vector<double> normalized(weights->begin(), weights->end());
    for (double& w : normalized) w /= total;
    double mean = 0.0;
    for (std::size_t f = 0; f < per_feature.size(); ++f) mean += normalized[f] * per_feature[f];
    out.mean = mean;
    out.weights = std::move(normalized);
  } else {
    out.mean = std::accumulate(per_feature.begin(), per_feature.end(), 0.0) /
               static_cast<double>(per_feature.size());
  }
  out.per_feature = std::move(per_feature);
  return out;
}

double kl_divergence(const JointHistogramPair& h) {
  return feature_mean(h, kl_terms);
}

double jensen_shannon(const JointHistogramPair& h) {
  return feature_mean(h, [](const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double m = 0.5 * (p[k] + q[k]);
      const double tp = p[k] > 0.0 ? 0.5 * p[k] * std::log(p[k] / m) : 0.0;
      const double tq = q[k] > 0.0 ? 0.5 * q[k] * std::log(q[k] / m) : 0.0;
      s += tp + tq;
    }
    return std::clamp(s, 0.0, std::log(2.0));
  });
}

double hellinger(const JointHistogramPair& h) {
  return feature_mean(h, [](const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double d = std::sqrt(p[k]) - std::sqrt(q[k]);
      s += d * d;
    }
    return std::min(1.0, std::sqrt(s) / std::sqrt(2.0));
  });
}

double total_variation(const JointHistogramPair& h) {
  return feature_mean(h, [](const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) s += std::abs(p[k] - q[k]);
    return std::min(1.0, 0.5 * s);
  });
}

namespace {

double w1_sorted(std::span<const double> a, std::span<const double> b) {
  // Both quantile functions are step functions with breakpoints at i/m_a and
  // j/m_b. Walk the merged breakpoints, comparing them exactly in integers.
  const std::size_t ma = a.size();
  const std::size_t mb = b.size();
  std::size_t i = 0;
  std::size_t j = 0;
  double t = 0.0;
  double area = 0.0;
  while (i < ma && j < mb) {
    const std::size_t ni = (i + 1) * mb;  // (i+1)/ma scaled by ma*mb
    const std::size_t nj = (j + 1) * ma;
    const std::size_t next = std::min(ni, nj);
    const double t_next = static_cast<double>(next) / static_cast<double>(ma * mb);
    area += (t_next - t) * std::abs(a[i] - b[j]);
    t = t_next;
    if (ni == next) ++i;
    if (nj == next) ++j;
  }
  return area;
}

}  // namespace

double wasserstein1_1d(std::span<const double> a, std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return w1_sorted(x, y);
}

FeatureAggregation wasserstein1(const Dataset& a, const Dataset& b,
                                std::optional<std::span<const double>> weights) {
  return aggregate(per_feature_sorted(a, b,
                                      [](const std::vector<double>& x, const std::vector<double>& y) {
                                        return w1_sorted(x, y);
                                      }),
                   weights);
}

namespace {

double ks_sorted(std::span<const double> a, std::span<const double> b) {
  const double ma = static_cast<double>(a.size());
  const double mb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double sup = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    // Consume ties on both sides before evaluating the CDFs at x.
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / ma - static_cast<double>(j) / mb));
  }
  return sup;
}

}  // namespace

double ks_statistic_1d(std::span<const double> a, std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return ks_sorted(x, y);
}

FeatureAggregation kolmogorov_smirnov(const Dataset& a, const Dataset& b,
                                      std::optional<std::span<const double>> weights) {
  return aggregate(per_feature_sorted(a, b,
                                      [](const std::vector<double>& x, const std::vector<double>& y) {
                                        return ks_sorted(x, y);
                                      }),
                   weights);
}

double energy_distance(const Dataset& a, const Dataset& b) {
  require_same_cols(a, b);
  const bool swap = canonical_less(b, a);
  const Matrix& x = swap ? b.data() : a.data();
  const Matrix& y = swap ? a.data() : b.data();
  const double xy = mean_cross_distance(x, y);
  const double xx = mean_cross_distance(x, x);
  const double yy = mean_cross_distance(y, y);
  return std::max(0.0, 2.0 * xy - xx - yy);
}

double median_pairwise_distance(const Dataset& a, const Dataset& b) {
  require_same_cols(a, b);
  const bool swap = canonical_less(b, a);
  const Matrix& first = swap ? b.data() : a.data();
  const Matrix& second = swap ? a.data() : b.data();
  Matrix pooled(first.rows() + second.rows(), first.cols());
  pooled << first, second;
  const auto n = static_cast<std::size_t>(pooled.rows());
  if (n < 2) return 0.0;
  std::vector<double> d;
  d.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d.push_back((pooled.row(static_cast<Eigen::Index>(i)) - pooled.row(static_cast<Eigen::Index>(j))).norm());
    }
  }
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  const double upper = d[mid];
  if (d.size() % 2 == 1) return upper;
  const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double mmd(const Dataset& a, const Dataset& b, MmdKernel kernel) {
  require_same_cols(a, b);
  const bool swap = canonical_less(b, a);
  const Matrix& x = swap ? b.data() : a.data();
  const Matrix& y = swap ? a.data() : b.data();
  if (kernel == MmdKernel::linear) {
    return (x.colwise().mean() - y.colwise().mean()).squaredNorm();
  }
  const double sigma = median_pairwise_distance(a, b);
  if (!(sigma > 0.0)) return 0.0;
  const double gamma = 1.0 / (2.0 * sigma * sigma);
  const double kxx = mean_cross_kernel(x, x, gamma);
  const double kyy = mean_cross_kernel(y, y, gamma);
  const double kxy = mean_cross_kernel(x, y, gamma);
  return std::max(0.0, kxx + kyy - 2.0 * kxy);
}

}  // namespace dsetdist
