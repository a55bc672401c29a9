#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsetdist/core.hpp"

namespace dsetdist {

/// Lowest NMSE reported; exact reconstructions would otherwise be -inf dB.
inline constexpr double kNmseFloorDb = -300.0;

/// Rank-r PCA fitted on the source, applied to the target; NMSE in dB.
double reconstruction_task(const Dataset& source, const Dataset& target, int rank);

/// Nearest-class-centroid classifier fitted on the source; top-1 accuracy on the target.
double beam_task(const Dataset& source, const Dataset& target);

enum class TaskKind { reconstruction, beam_classification };
enum class LossKind { nmse_db, top1_accuracy };

std::string to_string(TaskKind t);
std::string to_string(LossKind l);
TaskKind parse_task_kind(const std::string& s);

struct TaskParams {
  TaskKind kind = TaskKind::reconstruction;
  int rank = 32;  // reconstruction only; clamped to each source's rank
};

struct PerformanceMatrix {
  Eigen::MatrixXd scores;  // scores(i, j): trained on i, evaluated on j
  Eigen::MatrixXd drop;    // >= 0 means worse transfer, diagonal exactly 0
  TaskKind task = TaskKind::reconstruction;
  LossKind loss_kind = LossKind::nmse_db;
};

/// Orients the drop so that larger means worse for both loss and accuracy scores.
Eigen::MatrixXd performance_drop(const Eigen::MatrixXd& scores, LossKind kind);

PerformanceMatrix performance_matrix(const DatasetGroup& group, const TaskParams& params);

struct DistanceMatrix {
  Eigen::MatrixXd values;
  std::string descriptor;
  bool symmetric = true;
};

struct Correlation {
  std::optional<double> value;  // nullopt when either vector has zero variance
  std::string note;
};

struct CorrelationReport {
  Correlation pearson;
  Correlation spearman;
  std::size_t n_pairs = 0;
  bool include_diagonal = false;
  std::vector<std::pair<double, double>> scatter;  // (distance, drop)
};

Correlation pearson(std::span<const double> x, std::span<const double> y);
Correlation spearman(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> x);

/// Row-major vectorization, optionally skipping the diagonal.
std::vector<double> vectorize(const Eigen::MatrixXd& m, bool include_diagonal);

CorrelationReport correlate(const DistanceMatrix& dm, const PerformanceMatrix& pm,
                            bool include_diagonal = false);

}  // namespace dsetdist
