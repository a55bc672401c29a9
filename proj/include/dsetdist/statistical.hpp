#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dsetdist/core.hpp"
#include "dsetdist/histogram.hpp"

namespace dsetdist {

/// Per-feature values and their (optionally importance-weighted) mean.
struct FeatureAggregation {
  std::vector<double> per_feature;
  double mean = 0.0;
  std::optional<std::vector<double>> weights;
};

/// Weights must be non-negative with positive sum; they are normalized to 1.
FeatureAggregation aggregate(std::vector<double> per_feature,
                             std::optional<std::span<const double>> weights = std::nullopt);

// Divergences over joint histograms; natural log; uniform mean over features.
double kl_divergence(const JointHistogramPair& h);
double jensen_shannon(const JointHistogramPair& h);
double hellinger(const JointHistogramPair& h);
double total_variation(const JointHistogramPair& h);

/// Exact empirical 1-Wasserstein per feature from the quantile-function integral.
FeatureAggregation wasserstein1(const Dataset& a, const Dataset& b,
                                std::optional<std::span<const double>> weights = std::nullopt);

/// 1-D W1 between two samples.
double wasserstein1_1d(std::span<const double> a, std::span<const double> b);

FeatureAggregation kolmogorov_smirnov(const Dataset& a, const Dataset& b,
                                      std::optional<std::span<const double>> weights = std::nullopt);

double ks_statistic_1d(std::span<const double> a, std::span<const double> b);

/// V-statistic energy distance on full multivariate points.
double energy_distance(const Dataset& a, const Dataset& b);

enum class MmdKernel { linear, rbf };

/// Biased MMD^2. The RBF bandwidth is the median pooled pairwise distance.
double mmd(const Dataset& a, const Dataset& b, MmdKernel kernel);

/// Median of all unordered pairwise distances in the pooled sample.
double median_pairwise_distance(const Dataset& a, const Dataset& b);

}  // namespace dsetdist
