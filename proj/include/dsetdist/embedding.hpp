#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dsetdist/core.hpp"

namespace dsetdist {

enum class EmbeddingMethod { pca, graph, imported };
enum class PointMetric { euclidean, correlation };

std::string to_string(EmbeddingMethod m);
std::string to_string(PointMetric m);
PointMetric parse_point_metric(const std::string& s);

struct EmbeddingConfig {
  EmbeddingMethod method = EmbeddingMethod::graph;
  int out_dims = 2;
  int n_neighbors = 32;
  double min_dist = 0.1;
  PointMetric point_metric = PointMetric::euclidean;
  std::optional<int> pca_prereduce = 100;
  int epochs = 200;
  std::uint64_t seed = 0;
  bool supervised = false;
  double label_repulsion = 0.1;
  int negative_samples = 5;
};

/// Coordinates of every pooled row, with the row ranges of each source dataset.
struct JointEmbedding {
  Matrix coordinates;                          // total_rows x out_dims
  std::vector<Eigen::Index> dataset_offsets;   // K + 1 entries
  std::vector<std::optional<Labels>> labels;   // carried from the sources
  std::vector<std::string> names;
  EmbeddingConfig config;
  /// PCA only: variance captured by each retained component.
  std::vector<double> explained_variance;
};

/// Top principal directions of a centered matrix.
struct PcaBasis {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd components;        // N x k, orthonormal columns
  std::vector<double> variances;     // per retained component (sample variance, 1/(n-1))
  Eigen::Index rank = 0;             // numerical rank of the centered data
};

/// Components follow the sign convention: the largest-|entry| of each is positive.
PcaBasis fit_pca_basis(const Matrix& data, int k);
/// Like fit_pca_basis but keeps min(max_k, rank) components instead of throwing.
PcaBasis fit_pca_basis_upto(const Matrix& data, int max_k);

JointEmbedding fit_pca(const DatasetGroup& group, int out_dims);

JointEmbedding fit_graph_embedding(const DatasetGroup& group, const EmbeddingConfig& config);

/// Pooled coordinates produced elsewhere (DSD file), one row per pooled point.
JointEmbedding import_embedding(const DatasetGroup& group, const std::filesystem::path& path);
JointEmbedding import_embedding(const DatasetGroup& group, Matrix coordinates);

DatasetGroup transform_groups(const JointEmbedding& embedding);

// Exposed for testing.

/// Fits (a, b) of 1 / (1 + a d^{2b}) to the min_dist offset-exponential target.
std::pair<double, double> fit_curve_params(double min_dist, double spread = 1.0);

struct KnnGraph {
  std::vector<std::vector<Eigen::Index>> indices;  // per point, ascending distance
  std::vector<std::vector<double>> distances;
};

KnnGraph exact_knn(const Matrix& points, int k, PointMetric metric);

/// Symmetric fuzzy membership graph as a sorted edge list with i < j.
struct FuzzyEdge {
  Eigen::Index i;
  Eigen::Index j;
  double weight;
};

std::vector<FuzzyEdge> fuzzy_graph(const KnnGraph& knn, std::vector<double>* sigmas = nullptr,
                                   std::vector<double>* rhos = nullptr);

}  // namespace dsetdist
