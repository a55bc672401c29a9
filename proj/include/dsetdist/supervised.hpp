#pragma once

#include <cstdint>
#include <functional>
#include <map>

#include "dsetdist/core.hpp"
#include "dsetdist/embedding.hpp"

namespace dsetdist {

/// Per-label penalty: the largest distance between any two points carrying the
/// label anywhere in a dataset group. Computed once per group and shared by
/// every pair in that group.
struct LabelPenaltyTable {
  std::map<Label, double> penalty;

  double at(Label l) const;
};

LabelPenaltyTable penalty_table(const DatasetGroup& group,
                                PointMetric point_metric = PointMetric::euclidean);

/// Distance between two unlabeled point sets, applied per shared label.
using BaseDistance = std::function<double(const Dataset&, const Dataset&)>;

/// Shared labels contribute base(a|l, b|l); labels present in only one dataset
/// contribute P_l / 2. The result is the mean over the union of labels.
/// A base that throws InsufficientDataError on a small per-label subset falls
/// back to the centroid Euclidean distance for that label.
double label_aware_distance(const Dataset& a, const Dataset& b, const LabelPenaltyTable& table,
                            const BaseDistance& base);

struct PadOptions {
  double train_fraction = 0.7;
  double l2 = 1e-3;
  int epochs = 500;
  double learning_rate = 0.5;
};

/// Proxy-A distance 2(1 - 2e), clamped to [0, 2], where e is the balanced test
/// error of a linear logistic classifier separating the two datasets.
double proxy_a_distance(const Dataset& a, const Dataset& b, std::uint64_t seed,
                        PadOptions options = {});

}  // namespace dsetdist
