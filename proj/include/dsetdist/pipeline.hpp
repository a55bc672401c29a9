#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dsetdist/core.hpp"
#include "dsetdist/embedding.hpp"
#include "dsetdist/supervised.hpp"
#include "dsetdist/transfer.hpp"

namespace dsetdist {

/// Where distances are measured: raw features, PCA, neighbor-graph embedding
/// (optionally label-supervised) or coordinates imported from a file.
struct SpaceSpec {
  enum class Kind { raw, pca, graph, supervised_graph, imported };
  Kind kind = Kind::raw;
  int dims = 0;
  std::filesystem::path import_path;

  /// Accepts raw, pca<d>, umap<d>, sumap<d> and import:<path>.
  static SpaceSpec parse(const std::string& text);
  std::string to_string() const;
};

/// A registered metric, optionally wrapped in the label-aware decomposition.
struct MetricSpec {
  std::string base;
  bool label_aware = false;

  /// Accepts a registered name or label_aware:<name>.
  static MetricSpec parse(const std::string& text);
  std::string to_string() const;
  bool symmetric() const;
};

/// Every registered base metric name.
const std::vector<std::string>& metric_names();

struct MetricParams {
  std::optional<int> bins;           // histogram metrics; default from sample sizes
  int clusters = 3;                  // cluster_euclidean
  std::optional<int> subspace_dim;   // subspace metrics; default min(10, N)
  std::uint64_t seed = 0;            // k-means and PAD
  std::optional<std::vector<double>> weights;  // per-feature metrics
  PointMetric penalty_metric = PointMetric::euclidean;  // label-aware penalty table
};

/// Callable distance between two datasets for a fixed (metric, params).
BaseDistance make_distance(const std::string& base, const MetricParams& params);

/// Applies a space transform jointly over the whole group.
DatasetGroup apply_space(const DatasetGroup& group, const SpaceSpec& space,
                         const EmbeddingConfig& embedding);

/// Raised with the offending metric and dataset pair.
class PairError : public Error {
 public:
  PairError(std::string metric, std::size_t i, std::size_t j, const std::string& what);
  const std::string& metric() const noexcept { return metric_; }
  std::size_t i() const noexcept { return i_; }
  std::size_t j() const noexcept { return j_; }

 private:
  std::string metric_;
  std::size_t i_;
  std::size_t j_;
};

/// Matrix of the metric over a group already in its target space.
DistanceMatrix distance_matrix_in_space(const DatasetGroup& space_group, const MetricSpec& metric,
                                        const MetricParams& params, std::string descriptor = {});

struct Pipeline {
  SpaceSpec space;
  MetricSpec metric;
  MetricParams params;
  EmbeddingConfig embedding;

  std::string descriptor() const;
};

DistanceMatrix distance_matrix(const DatasetGroup& group, const Pipeline& pipeline);

}  // namespace dsetdist
