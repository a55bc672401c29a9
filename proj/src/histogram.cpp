#include "dsetdist/histogram.hpp"

#include <algorithm>
#include <cmath>

namespace dsetdist {

namespace {

std::vector<double> column_pdf(const Matrix& data, Eigen::Index col,
                               const std::vector<double>& edges) {
  const std::size_t bins = edges.size() - 1;
  std::vector<double> counts(bins, 0.0);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double x = data(i, col);
    // Half-open [b_{k-1}, b_k); the last bin also takes b_K.
    auto k = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) -
                                      edges.begin());
    k = std::clamp<std::size_t>(k, 1, bins) - 1;
    counts[k] += 1.0;
  }
  const double m = static_cast<double>(data.rows());
  double total = 0.0;
  for (double& c : counts) {
    c = c / m + kHistogramEpsilon;
    total += c;
  }
  for (double& c : counts) c /= total;
  return counts;
}

}  // namespace

int default_bin_count(Eigen::Index m_a, Eigen::Index m_b) {
  const double root = std::sqrt(static_cast<double>(std::max(m_a, m_b)));
  return std::max(2, static_cast<int>(std::floor(root + 0.5)));
}

JointHistogramPair joint_histograms(const Dataset& a, const Dataset& b, std::optional<int> bins) {
  require_same_cols(a, b);
  if (bins && *bins < 1) throw ValidationError("bin count must be positive");
  const int k = bins.value_or(default_bin_count(a.rows(), b.rows()));

  JointHistogramPair out;
  const auto n = static_cast<std::size_t>(a.cols());
  out.bin_edges.resize(n);
  out.pdf_a.resize(n);
  out.pdf_b.resize(n);
  out.degenerate.assign(n, false);

  for (std::size_t f = 0; f < n; ++f) {
    const auto col = static_cast<Eigen::Index>(f);
    const double lo = std::min(a.data().col(col).minCoeff(), b.data().col(col).minCoeff());
    const double hi = std::max(a.data().col(col).maxCoeff(), b.data().col(col).maxCoeff());
    if (!(hi > lo)) {
      out.bin_edges[f] = {lo, hi};
      out.pdf_a[f] = {1.0};
      out.pdf_b[f] = {1.0};
      out.degenerate[f] = true;
      continue;
    }
    std::vector<double> edges(static_cast<std::size_t>(k) + 1);
    const double width = (hi - lo) / k;
    for (int e = 0; e < k; ++e) edges[static_cast<std::size_t>(e)] = lo + e * width;
    edges.back() = hi;
    out.pdf_a[f] = column_pdf(a.data(), col, edges);
    out.pdf_b[f] = column_pdf(b.data(), col, edges);
    out.bin_edges[f] = std::move(edges);
  }
  return out;
}

}  // namespace dsetdist
