#pragma once

#include <optional>
#include <vector>

#include "dsetdist/core.hpp"

namespace dsetdist {

/// Smoothing mass added to every bin before renormalizing.
inline constexpr double kHistogramEpsilon = 1e-10;

/// Per-feature empirical PDFs of two datasets over shared, equal-width bins.
struct JointHistogramPair {
  std::vector<std::vector<double>> bin_edges;  // per feature, bins + 1 ascending values
  std::vector<std::vector<double>> pdf_a;
  std::vector<std::vector<double>> pdf_b;
  /// True where the combined column is constant; both pdfs are then [1.0].
  std::vector<bool> degenerate;

  std::size_t features() const noexcept { return bin_edges.size(); }
};

/// round(sqrt(max(m_a, m_b))), half-up, never below 2.
int default_bin_count(Eigen::Index m_a, Eigen::Index m_b);

JointHistogramPair joint_histograms(const Dataset& a, const Dataset& b,
                                    std::optional<int> bins = std::nullopt);

}  // namespace dsetdist
