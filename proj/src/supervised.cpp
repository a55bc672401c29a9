#include "dsetdist/supervised.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsetdist/geometric.hpp"
#include "dsetdist/util.hpp"

namespace dsetdist {

double LabelPenaltyTable::at(Label l) const {
  const auto it = penalty.find(l);
  if (it == penalty.end()) {
    throw ValidationError("penalty table has no entry for label " + std::to_string(l));
  }
  return it->second;
}

namespace {

double max_pairwise(const Matrix& pts, PointMetric metric) {
  Matrix z;
  if (metric == PointMetric::correlation) {
    z = pts.colwise() - pts.rowwise().mean();
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double n = z.row(i).norm();
      if (n > 0.0) z.row(i) /= n;
    }
  }
  std::vector<double> row_max(static_cast<std::size_t>(pts.rows()), 0.0);
  parallel_for(row_max.size(), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double best = 0.0;
    for (Eigen::Index j = ii + 1; j < pts.rows(); ++j) {
      const double d = metric == PointMetric::euclidean
                           ? (pts.row(ii) - pts.row(j)).norm()
                           : std::clamp(1.0 - z.row(ii).dot(z.row(j)), 0.0, 2.0);
      best = std::max(best, d);
    }
    row_max[i] = best;
  });
  return row_max.empty() ? 0.0 : *std::max_element(row_max.begin(), row_max.end());
}

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

LabelPenaltyTable penalty_table(const DatasetGroup& group, PointMetric point_metric) {
  if (!group.all_labeled()) throw ValidationError("penalty table requires labels on every dataset");
  LabelPenaltyTable table;
  for (Label l : group.label_vocabulary()) {
    Eigen::Index total = 0;
    for (const auto& ds : group.datasets()) {
      total += std::count(ds.labels()->begin(), ds.labels()->end(), l);
    }
    Matrix pts(total, group.cols());
    Eigen::Index r = 0;
    for (const auto& ds : group.datasets()) {
      const auto& labels = *ds.labels();
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == l) pts.row(r++) = ds.data().row(static_cast<Eigen::Index>(i));
      }
    }
    if (total < 2) log_warning("label " + std::to_string(l) + " has a single point group-wide; penalty is 0");
    table.penalty[l] = max_pairwise(pts, point_metric);
  }
  return table;
}

double label_aware_distance(const Dataset& a, const Dataset& b, const LabelPenaltyTable& table,
                            const BaseDistance& base) {
  require_same_cols(a, b);
  if (!a.has_labels() || !b.has_labels()) {
    throw ValidationError("label-aware distance requires labeled datasets");
  }
  const Labels la = a.label_set();
  const Labels lb = b.label_set();
  Labels all;
  std::set_union(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(all));
  double total = 0.0;
  for (Label l : all) {
    const bool in_a = std::binary_search(la.begin(), la.end(), l);
    const bool in_b = std::binary_search(lb.begin(), lb.end(), l);
    if (in_a && in_b) {
      const Dataset sa = a.select_label(l).with_labels(std::nullopt);
      const Dataset sb = b.select_label(l).with_labels(std::nullopt);
      try {
        total += base(sa, sb);
      } catch (const InsufficientDataError& e) {
        log_warning("label " + std::to_string(l) + ": base distance undefined (" + e.what() +
                    "); using centroid Euclidean");
        total += centroid_euclidean(sa, sb);
      }
    } else {
      total += table.at(l) / 2.0;
    }
  }
  return all.empty() ? 0.0 : total / static_cast<double>(all.size());
}

double proxy_a_distance(const Dataset& a, const Dataset& b, std::uint64_t seed, PadOptions options) {
  require_same_cols(a, b);
  if (a.rows() < 10 || b.rows() < 10) {
    throw InsufficientDataError("proxy-A distance needs at least 10 points per dataset");
  }
  const bool swap = canonical_less(b, a);
  const Matrix& x0 = swap ? b.data() : a.data();
  const Matrix& x1 = swap ? a.data() : b.data();

  // Stratified split per origin.
  Rng rng(seed);
  auto split = [&](Eigen::Index m) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[rng.index(i + 1)]);
    const auto n_train = static_cast<std::size_t>(
        std::clamp<double>(std::round(options.train_fraction * static_cast<double>(m)), 1.0,
                           static_cast<double>(m - 1)));
    return std::pair{std::vector<Eigen::Index>(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train)),
                     std::vector<Eigen::Index>(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end())};
  };
  const auto [train0, test0] = split(x0.rows());
  const auto [train1, test1] = split(x1.rows());

  const Eigen::Index n_feat = x0.cols();
  const auto n_train = static_cast<Eigen::Index>(train0.size() + train1.size());
  Matrix xt(n_train, n_feat);
  Eigen::VectorXd yt(n_train);
  Eigen::VectorXd sw(n_train);
  Eigen::Index r = 0;
  for (Eigen::Index i : train0) {
    xt.row(r) = x0.row(i);
    yt(r) = 0.0;
    sw(r++) = 0.5 / static_cast<double>(train0.size());
  }
  for (Eigen::Index i : train1) {
    xt.row(r) = x1.row(i);
    yt(r) = 1.0;
    sw(r++) = 0.5 / static_cast<double>(train1.size());
  }
  const Eigen::RowVectorXd mean = xt.colwise().mean();
  Eigen::RowVectorXd scale = ((xt.rowwise() - mean).array().square().colwise().sum() /
                              static_cast<double>(n_train)).sqrt();
  for (Eigen::Index j = 0; j < n_feat; ++j) {
    if (scale(j) < 1e-12) scale(j) = 1.0;
  }
  const Matrix z = (xt.rowwise() - mean).array().rowwise() / scale.array();

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n_feat);
  double bias = 0.0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const Eigen::VectorXd logits = (z * w).array() + bias;
    Eigen::VectorXd resid(n_train);
    for (Eigen::Index i = 0; i < n_train; ++i) resid(i) = sw(i) * (sigmoid(logits(i)) - yt(i));
    const Eigen::VectorXd grad = z.transpose() * resid + options.l2 * w;
    w -= options.learning_rate * grad;
    bias -= options.learning_rate * resid.sum();
  }

  auto error_rate = [&](const Matrix& x, const std::vector<Eigen::Index>& rows, double truth) {
    std::size_t wrong = 0;
    for (Eigen::Index i : rows) {
      const Eigen::RowVectorXd zi = (x.row(i) - mean).array() / scale.array();
      const double predicted = zi.dot(w) + bias >= 0.0 ? 1.0 : 0.0;
      if (predicted != truth) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(rows.size());
  };
  const double eps = 0.5 * (error_rate(x0, test0, 0.0) + error_rate(x1, test1, 1.0));
  return std::clamp(2.0 * (1.0 - 2.0 * eps), 0.0, 2.0);
}

}  // namespace dsetdist
