#include <gtest/gtest.h>

#include "dsetdist/geometric.hpp"
#include "dsetdist/supervised.hpp"
#include "oracles.hpp"

using namespace dsetdist;

namespace {

Dataset labeled(Matrix x, Labels l) { return Dataset(std::move(x), std::move(l)); }

Dataset random_labeled(Rng& rng, Eigen::Index rows, Eigen::Index cols, int n_labels, double scale = 1.0) {
  Labels l(static_cast<std::size_t>(rows));
  for (auto& v : l) v = static_cast<Label>(rng.index(static_cast<std::uint64_t>(n_labels)));
  return labeled(oracle::random_matrix(rng, rows, cols, scale), l);
}

LabelPenaltyTable table_of(std::map<Label, double> m) {
  LabelPenaltyTable t;
  t.penalty = std::move(m);
  return t;
}

}  // namespace

TEST(PenaltyTable, MatchesExhaustiveOracle) {
  Rng rng(1);
  for (int t = 0; t < 5; ++t) {
    std::vector<Dataset> ds;
    for (int k = 0; k < 3; ++k) ds.push_back(random_labeled(rng, 12, 3, 4, 1.0 + k));
    const LabelPenaltyTable got = penalty_table(DatasetGroup(ds));
    const auto want = oracle::penalty_table(ds);
    ASSERT_EQ(got.penalty.size(), want.size());
    for (const auto& [l, p] : want) EXPECT_NEAR(got.at(l), p, 1e-12) << "label " << l;
  }
}

TEST(PenaltyTable, SmallCases) {
  const Matrix zero = Matrix::Zero(1, 1);
  Matrix three(1, 1);
  three << 3.0;
  const LabelPenaltyTable t = penalty_table(DatasetGroup({labeled(zero, {5}), labeled(three, {5})}));
  EXPECT_DOUBLE_EQ(t.at(5), 3.0);
  const LabelPenaltyTable same = penalty_table(DatasetGroup({labeled(Matrix::Ones(3, 2), {1, 1, 1}),
                                                             labeled(Matrix::Ones(2, 2), {1, 1})}));
  EXPECT_EQ(same.at(1), 0.0);
  EXPECT_THROW(t.at(9), ValidationError);
  EXPECT_THROW(penalty_table(DatasetGroup({Dataset(zero), labeled(three, {5})})), ValidationError);
}

TEST(LabelAware, DisjointLabelsUsePenaltyHalves) {
  const Dataset a = labeled(Matrix::Zero(2, 1), {0, 0});
  const Dataset b = labeled(Matrix::Ones(2, 1), {1, 1});
  const LabelPenaltyTable t = table_of({{0, 4.0}, {1, 6.0}});
  EXPECT_DOUBLE_EQ(label_aware_distance(a, b, t, centroid_euclidean), 2.5);
}

TEST(LabelAware, IdenticalDatasetsGiveZero) {
  Rng rng(2);
  const Dataset a = random_labeled(rng, 30, 3, 4);
  const LabelPenaltyTable t = penalty_table(DatasetGroup({a, a}));
  EXPECT_EQ(label_aware_distance(a, a, t, centroid_euclidean), 0.0);
}

TEST(LabelAware, SharedSingleLabelReducesToBase) {
  Rng rng(3);
  const Dataset a = labeled(oracle::random_matrix(rng, 8, 2), Labels(8, 7));
  const Dataset b = labeled(oracle::random_matrix(rng, 6, 2), Labels(6, 7));
  const LabelPenaltyTable t = penalty_table(DatasetGroup({a, b}));
  EXPECT_DOUBLE_EQ(label_aware_distance(a, b, t, pairwise_euclidean), pairwise_euclidean(a, b));
}

TEST(LabelAware, DecompositionIdentities) {
  Rng rng(4);
  const Dataset a = random_labeled(rng, 20, 2, 2);
  const Dataset b = random_labeled(rng, 20, 2, 2);
  // Add label 9 only to a: one more P/2 term and one more label in the denominator.
  Matrix xa(21, 2);
  xa << a.data(), Matrix::Constant(1, 2, 5.0);
  Labels la = *a.labels();
  la.push_back(9);
  const Dataset a9 = labeled(xa, la);
  LabelPenaltyTable t = penalty_table(DatasetGroup({a, b}));
  t.penalty[9] = 8.0;
  const double base = label_aware_distance(a, b, t, centroid_euclidean);
  const double n = static_cast<double>(a.label_set().size());
  const double with9 = label_aware_distance(a9, b, t, centroid_euclidean);
  EXPECT_NEAR(with9, (base * n + 4.0) / (n + 1.0), 1e-12);
  EXPECT_EQ(label_aware_distance(a, b, t, centroid_euclidean), label_aware_distance(b, a, t, centroid_euclidean));
}

TEST(LabelAware, SmallSubsetFallsBackToCentroid) {
  const Dataset a = labeled(Matrix::Zero(1, 2), {0});
  Matrix y(1, 2);
  y << 3.0, 4.0;
  const Dataset b = labeled(y, {0});
  const LabelPenaltyTable t = penalty_table(DatasetGroup({a, b}));
  const BaseDistance clusters = [](const Dataset& x, const Dataset& z) { return cluster_euclidean(x, z, 3, 0); };
  EXPECT_DOUBLE_EQ(label_aware_distance(a, b, t, clusters), 5.0);
}

TEST(ProxyA, SameDistributionIsNearChance) {
  Rng rng(5);
  const Dataset a(oracle::random_matrix(rng, 500, 4));
  const Dataset b(oracle::random_matrix(rng, 500, 4));
  EXPECT_LT(proxy_a_distance(a, b, 1), 0.3);
}

TEST(ProxyA, SeparableIsNearTwo) {
  Rng rng(6);
  Matrix x = oracle::random_matrix(rng, 200, 3, 0.5);
  Matrix y = oracle::random_matrix(rng, 150, 3, 0.5);
  y.col(1).array() += 10.0;
  const double pad = proxy_a_distance(Dataset(x), Dataset(y), 2);
  EXPECT_GT(pad, 1.8);
  EXPECT_LE(pad, 2.0);
}

TEST(ProxyA, BoundedSymmetricAndValidated) {
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    const Dataset a(oracle::random_matrix(rng, 30, 2));
    const Dataset b(oracle::random_matrix(rng, 25, 2, 1.5));
    const double pad = proxy_a_distance(a, b, static_cast<std::uint64_t>(t));
    EXPECT_GE(pad, 0.0);
    EXPECT_LE(pad, 2.0);
    EXPECT_EQ(pad, proxy_a_distance(b, a, static_cast<std::uint64_t>(t)));
  }
  EXPECT_THROW(proxy_a_distance(Dataset(Matrix::Zero(5, 2)), Dataset(Matrix::Zero(20, 2)), 0), InsufficientDataError);
}
