#include "dsetdist/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "dsetdist/embedding.hpp"
#include "dsetdist/util.hpp"

namespace dsetdist {

double reconstruction_task(const Dataset& source, const Dataset& target, int rank) {
  require_same_cols(source, target);
  if (rank < 1) throw ValidationError("reconstruction rank must be positive");
  const PcaBasis basis = fit_pca_basis(source.data(), rank);
  const Matrix& x = target.data();
  const double energy = x.squaredNorm();
  if (!(energy > 0.0)) throw ValidationError("target '" + target.name() + "' is all zeros; NMSE undefined");
  const Matrix centered = x.rowwise() - basis.mean;
  const Matrix recon = (centered * basis.components) * basis.components.transpose();
  const double err = (centered - recon).squaredNorm();
  if (!(err > 0.0)) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(err / energy));
}

double beam_task(const Dataset& source, const Dataset& target) {
  require_same_cols(source, target);
  if (!source.has_labels() || !target.has_labels()) {
    throw ValidationError("beam task requires labeled source and target");
  }
  const Labels classes = source.label_set();
  Matrix centroids = Matrix::Zero(static_cast<Eigen::Index>(classes.size()), source.cols());
  std::vector<double> counts(classes.size(), 0.0);
  const auto& sl = *source.labels();
  for (std::size_t i = 0; i < sl.size(); ++i) {
    const auto c = static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), sl[i]) - classes.begin());
    centroids.row(static_cast<Eigen::Index>(c)) += source.data().row(static_cast<Eigen::Index>(i));
    counts[c] += 1.0;
  }
  for (std::size_t c = 0; c < classes.size(); ++c) centroids.row(static_cast<Eigen::Index>(c)) /= counts[c];

  const auto& tl = *target.labels();
  std::vector<char> hit(tl.size(), 0);
  parallel_for(tl.size(), [&](std::size_t i) {
    const auto xi = target.data().row(static_cast<Eigen::Index>(i));
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const double d = (xi - centroids.row(static_cast<Eigen::Index>(c))).squaredNorm();
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    hit[i] = classes[arg] == tl[i] ? 1 : 0;
  });
  return static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / static_cast<double>(tl.size());
}

std::string to_string(TaskKind t) {
  return t == TaskKind::reconstruction ? "reconstruction" : "beam_classification";
}

std::string to_string(LossKind l) { return l == LossKind::nmse_db ? "nmse_db" : "top1_accuracy"; }

TaskKind parse_task_kind(const std::string& s) {
  if (s == "reconstruction") return TaskKind::reconstruction;
  if (s == "beam_classification") return TaskKind::beam_classification;
  throw ValidationError("unknown task '" + s + "' (expected reconstruction or beam_classification)");
}

Eigen::MatrixXd performance_drop(const Eigen::MatrixXd& scores, LossKind kind) {
  const auto k = scores.rows();
  Eigen::MatrixXd drop(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      drop(i, j) = kind == LossKind::top1_accuracy ? scores(j, j) - scores(i, j) : scores(i, j) - scores(j, j);
    }
  }
  return drop;
}

PerformanceMatrix performance_matrix(const DatasetGroup& group, const TaskParams& params) {
  const auto k = static_cast<Eigen::Index>(group.size());
  PerformanceMatrix pm;
  pm.task = params.kind;
  pm.loss_kind = params.kind == TaskKind::reconstruction ? LossKind::nmse_db : LossKind::top1_accuracy;
  pm.scores.resize(k, k);

  std::vector<int> ranks(group.size(), params.rank);
  if (params.kind == TaskKind::reconstruction) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto r = fit_pca_basis_upto(group[i].data(), params.rank).components.cols();
      if (r < params.rank) {
        log_info("dataset '" + group[i].name() + "' has rank " + std::to_string(r) +
                 "; reconstruction uses that rank");
      }
      ranks[i] = static_cast<int>(std::max<Eigen::Index>(r, 1));
    }
  }
  parallel_for(static_cast<std::size_t>(k * k), [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx) / k;
    const auto j = static_cast<Eigen::Index>(idx) % k;
    const Dataset& src = group[static_cast<std::size_t>(i)];
    const Dataset& tgt = group[static_cast<std::size_t>(j)];
    pm.scores(i, j) = params.kind == TaskKind::reconstruction
                          ? reconstruction_task(src, tgt, ranks[static_cast<std::size_t>(i)])
                          : beam_task(src, tgt);
  });
  pm.drop = performance_drop(pm.scores, pm.loss_kind);
  return pm;
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("correlation inputs differ in length");
  if (x.size() < 2) return {std::nullopt, "undefined (fewer than 2 pairs)"};
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  // Relative threshold: a vector of identical values can leave rounding residue.
  const double tx = 1e-24 * std::max(1.0, mx * mx) * n;
  const double ty = 1e-24 * std::max(1.0, my * my) * n;
  if (sxx <= tx || syy <= ty) return {std::nullopt, "undefined (zero variance)"};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), {}};
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

std::vector<double> vectorize(const Eigen::MatrixXd& m, bool include_diagonal) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i == j && !include_diagonal) continue;
      out.push_back(m(i, j));
    }
  }
  return out;
}

CorrelationReport correlate(const DistanceMatrix& dm, const PerformanceMatrix& pm, bool include_diagonal) {
  if (dm.values.rows() != pm.drop.rows() || dm.values.cols() != pm.drop.cols()) {
    throw ShapeError("distance matrix is " + std::to_string(dm.values.rows()) + "x" +
                     std::to_string(dm.values.cols()) + " but performance matrix is " +
                     std::to_string(pm.drop.rows()) + "x" + std::to_string(pm.drop.cols()));
  }
  const auto d = vectorize(dm.values, include_diagonal);
  const auto p = vectorize(pm.drop, include_diagonal);
  CorrelationReport out;
  out.pearson = pearson(d, p);
  out.spearman = spearman(d, p);
  out.n_pairs = d.size();
  out.include_diagonal = include_diagonal;
  out.scatter.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out.scatter.emplace_back(d[i], p[i]);
  return out;
}

}  // namespace dsetdist
