#include "dsetdist/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dsetdist/util.hpp"

namespace dsetdist {

std::string to_string(EmbeddingMethod m) {
  switch (m) {
    case EmbeddingMethod::pca: return "pca";
    case EmbeddingMethod::graph: return "graph";
    case EmbeddingMethod::imported: return "imported";
  }
  return "unknown";
}

std::string to_string(PointMetric m) {
  return m == PointMetric::euclidean ? "euclidean" : "correlation";
}

PointMetric parse_point_metric(const std::string& s) {
  if (s == "euclidean") return PointMetric::euclidean;
  if (s == "correlation") return PointMetric::correlation;
  throw ValidationError("unknown point metric '" + s + "' (expected euclidean or correlation)");
}

namespace {

JointEmbedding shell_for(const DatasetGroup& group, Matrix coordinates, EmbeddingConfig config) {
  JointEmbedding out;
  out.coordinates = std::move(coordinates);
  out.dataset_offsets = group.offsets();
  for (const auto& ds : group.datasets()) {
    out.labels.push_back(ds.labels());
    out.names.push_back(ds.name());
  }
  out.config = config;
  return out;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

double clip(double v) { return std::clamp(v, -4.0, 4.0); }

void optimize_layout(Matrix& emb, const std::vector<FuzzyEdge>& edges, const EmbeddingConfig& config,
                     double a, double b) {
  if (edges.empty()) return;
  const auto n_vertices = static_cast<std::size_t>(emb.rows());
  const auto dims = emb.cols();
  const double max_w = std::max_element(edges.begin(), edges.end(), [](const auto& l, const auto& r) {
                         return l.weight < r.weight;
                       })->weight;

  // Both directions of every undirected edge take part, as heads and tails.
  struct Directed {
    Eigen::Index head;
    Eigen::Index tail;
    double epochs_per_sample;
  };
  std::vector<Directed> directed;
  directed.reserve(edges.size() * 2);
  const double cutoff = max_w / static_cast<double>(config.epochs);
  for (const auto& e : edges) {
    if (e.weight < cutoff || e.weight <= 0.0) continue;
    const double eps = max_w / e.weight;
    directed.push_back({e.i, e.j, eps});
    directed.push_back({e.j, e.i, eps});
  }

  std::vector<double> next_sample(directed.size());
  std::vector<double> per_negative(directed.size());
  std::vector<double> next_negative(directed.size());
  for (std::size_t e = 0; e < directed.size(); ++e) {
    next_sample[e] = directed[e].epochs_per_sample;
    per_negative[e] = directed[e].epochs_per_sample / config.negative_samples;
    next_negative[e] = per_negative[e];
  }

  Rng rng = Rng::stream(config.seed, 0x5eed);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double alpha = 1.0 - static_cast<double>(epoch) / config.epochs;
    const auto n = static_cast<double>(epoch);
    for (std::size_t e = 0; e < directed.size(); ++e) {
      if (next_sample[e] > n) continue;
      const Eigen::Index j = directed[e].head;
      const Eigen::Index k = directed[e].tail;
      {
        const double d2 = (emb.row(j) - emb.row(k)).squaredNorm();
        double coeff = 0.0;
        if (d2 > 0.0) {
          coeff = -2.0 * a * b * std::pow(d2, b - 1.0) / (a * std::pow(d2, b) + 1.0);
        }
        for (Eigen::Index d = 0; d < dims; ++d) {
          const double g = clip(coeff * (emb(j, d) - emb(k, d)));
          emb(j, d) += g * alpha;
          emb(k, d) -= g * alpha;
        }
      }
      next_sample[e] += directed[e].epochs_per_sample;

      const auto n_neg = static_cast<int>((n - next_negative[e]) / per_negative[e]);
      for (int p = 0; p < n_neg; ++p) {
        const auto other = static_cast<Eigen::Index>(rng.index(n_vertices));
        if (other == j) continue;
        const double d2 = (emb.row(j) - emb.row(other)).squaredNorm();
        double coeff = 0.0;
        if (d2 > 0.0) coeff = 2.0 * b / ((0.001 + d2) * (a * std::pow(d2, b) + 1.0));
        for (Eigen::Index d = 0; d < dims; ++d) {
          const double g = coeff > 0.0 ? clip(coeff * (emb(j, d) - emb(other, d))) : 4.0;
          emb(j, d) += g * alpha;
        }
      }
      next_negative[e] += n_neg * per_negative[e];
    }
  }
}

Matrix initial_layout(const Matrix& work, int out_dims, std::uint64_t seed) {
  Matrix init = Matrix::Zero(work.rows(), out_dims);
  const PcaBasis basis = fit_pca_basis_upto(work, out_dims);
  const auto k = basis.components.cols();
  if (k > 0) init.leftCols(k) = (work.rowwise() - basis.mean) * basis.components;
  const double max_abs = init.cwiseAbs().maxCoeff();
  if (max_abs > 0.0) init *= 10.0 / max_abs;
  Rng rng = Rng::stream(seed, 0x1417);
  for (Eigen::Index i = 0; i < init.rows(); ++i) {
    for (Eigen::Index d = 0; d < init.cols(); ++d) init(i, d) += 1e-4 * rng.normal();
  }
  return init;
}

}  // namespace

namespace {

PcaBasis pca_basis_impl(const Matrix& data, int k, bool clamp_to_rank) {
  if (k < 0) throw ValidationError("number of components must be non-negative");
  PcaBasis out;
  out.mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - out.mean;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double tol = std::max(1e-12, sv.size() > 0 ? sv(0) * 1e-10 : 0.0);
  while (out.rank < sv.size() && sv(out.rank) > tol) ++out.rank;
  if (clamp_to_rank) k = static_cast<int>(std::min<Eigen::Index>(k, out.rank));
  if (k > out.rank) {
    throw InsufficientDataError("requested " + std::to_string(k) +
                                " components but the centered data has rank " +
                                std::to_string(out.rank));
  }
  out.components = svd.matrixV().leftCols(k);
  const double denom = std::max<double>(1.0, static_cast<double>(data.rows() - 1));
  for (int c = 0; c < k; ++c) {
    out.variances.push_back(sv(c) * sv(c) / denom);
    Eigen::Index arg = 0;
    out.components.col(c).cwiseAbs().maxCoeff(&arg);
    if (out.components(arg, c) < 0.0) out.components.col(c) *= -1.0;
  }
  return out;
}

}  // namespace

PcaBasis fit_pca_basis(const Matrix& data, int k) { return pca_basis_impl(data, k, false); }

PcaBasis fit_pca_basis_upto(const Matrix& data, int max_k) { return pca_basis_impl(data, max_k, true); }

JointEmbedding fit_pca(const DatasetGroup& group, int out_dims) {
  if (out_dims < 1 || out_dims > group.cols()) {
    throw ValidationError("PCA output dimension " + std::to_string(out_dims) +
                          " must be in [1, " + std::to_string(group.cols()) + "]");
  }
  const Matrix pooled = group.pooled();
  const PcaBasis basis = fit_pca_basis(pooled, out_dims);
  Matrix coords = (pooled.rowwise() - basis.mean) * basis.components;
  EmbeddingConfig cfg;
  cfg.method = EmbeddingMethod::pca;
  cfg.out_dims = out_dims;
  JointEmbedding out = shell_for(group, std::move(coords), cfg);
  out.explained_variance = basis.variances;
  return out;
}

std::pair<double, double> fit_curve_params(double min_dist, double spread) {
  constexpr int kSamples = 300;
  std::vector<double> xs(kSamples);
  std::vector<double> ys(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    xs[static_cast<std::size_t>(i)] = 3.0 * spread * i / (kSamples - 1);
    const double x = xs[static_cast<std::size_t>(i)];
    ys[static_cast<std::size_t>(i)] = x < min_dist ? 1.0 : std::exp(-(x - min_dist) / spread);
  }
  auto residuals = [&](double a, double b, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(kSamples);
    if (jac) jac->resize(kSamples, 2);
    for (int i = 0; i < kSamples; ++i) {
      const double x = xs[static_cast<std::size_t>(i)];
      const double u = x > 0.0 ? std::pow(x, 2.0 * b) : 0.0;
      const double f = 1.0 / (1.0 + a * u);
      r(i) = f - ys[static_cast<std::size_t>(i)];
      if (jac) {
        const double f2 = f * f;
        (*jac)(i, 0) = -u * f2;
        (*jac)(i, 1) = x > 0.0 ? -a * u * 2.0 * std::log(x) * f2 : 0.0;
      }
    }
  };
  // Levenberg-Marquardt from (1, 1).
  double a = 1.0;
  double b = 1.0;
  double lambda = 1e-3;
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  residuals(a, b, r, &jac);
  double cost = r.squaredNorm();
  for (int it = 0; it < 500; ++it) {
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    const Eigen::Vector2d jtr = jac.transpose() * r;
    Eigen::Matrix2d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal();
    const Eigen::Vector2d step = damped.ldlt().solve(-jtr);
    const double na = a + step(0);
    const double nb = b + step(1);
    Eigen::VectorXd nr;
    residuals(na, nb, nr, nullptr);
    const double ncost = nr.squaredNorm();
    if (ncost < cost && na > 0.0 && nb > 0.0) {
      const bool converged = cost - ncost < 1e-15 * (1.0 + cost);
      a = na;
      b = nb;
      cost = ncost;
      residuals(a, b, r, &jac);
      lambda = std::max(lambda / 10.0, 1e-12);
      if (converged) break;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  return {a, b};
}

KnnGraph exact_knn(const Matrix& points, int k, PointMetric metric) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k < 1 || static_cast<std::size_t>(k) >= n) {
    throw ValidationError("n_neighbors=" + std::to_string(k) + " must be in [1, " +
                          std::to_string(n - 1) + "] for " + std::to_string(n) + " points");
  }
  Matrix normalized;
  if (metric == PointMetric::correlation) {
    normalized = points.colwise() - points.rowwise().mean();
    for (Eigen::Index i = 0; i < normalized.rows(); ++i) {
      const double norm = normalized.row(i).norm();
      if (norm > 0.0) normalized.row(i) /= norm;
    }
  }
  KnnGraph out;
  out.indices.resize(n);
  out.distances.resize(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::pair<double, Eigen::Index>> cand;
    cand.reserve(n - 1);
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
      if (j == ii) continue;
      double d;
      if (metric == PointMetric::euclidean) {
        d = (points.row(ii) - points.row(j)).norm();
      } else {
        d = std::clamp(1.0 - normalized.row(ii).dot(normalized.row(j)), 0.0, 2.0);
      }
      cand.emplace_back(d, j);
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    out.indices[i].resize(static_cast<std::size_t>(k));
    out.distances[i].resize(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) {
      out.distances[i][static_cast<std::size_t>(t)] = cand[static_cast<std::size_t>(t)].first;
      out.indices[i][static_cast<std::size_t>(t)] = cand[static_cast<std::size_t>(t)].second;
    }
  });
  return out;
}

std::vector<FuzzyEdge> fuzzy_graph(const KnnGraph& knn, std::vector<double>* sigmas,
                                   std::vector<double>* rhos) {
  const std::size_t n = knn.indices.size();
  std::vector<double> sigma(n);
  std::vector<double> rho(n);
  parallel_for(n, [&](std::size_t i) {
    const auto& d = knn.distances[i];
    const double target = std::log2(static_cast<double>(d.size()));
    rho[i] = d.front();
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double mid = 1.0;
    for (int it = 0; it < 64; ++it) {
      double psum = 0.0;
      for (double dj : d) psum += std::exp(-std::max(0.0, dj - rho[i]) / mid);
      if (std::abs(psum - target) < 1e-5) break;
      if (psum > target) {
        hi = mid;
        mid = 0.5 * (lo + hi);
      } else {
        lo = mid;
        mid = std::isinf(hi) ? mid * 2.0 : 0.5 * (lo + hi);
      }
    }
    // Floor keeps sigma away from zero when all neighbors sit at rho.
    const double mean_d = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    sigma[i] = std::max({mid, 1e-3 * mean_d, 1e-12});
  });

  struct Directed {
    Eigen::Index lo;
    Eigen::Index hi;
    double w;
  };
  std::vector<Directed> entries;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < knn.indices[i].size(); ++t) {
      const Eigen::Index j = knn.indices[i][t];
      const double w = std::exp(-std::max(0.0, knn.distances[i][t] - rho[i]) / sigma[i]);
      const auto ii = static_cast<Eigen::Index>(i);
      entries.push_back({std::min(ii, j), std::max(ii, j), w});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Directed& l, const Directed& r) {
    return std::tie(l.lo, l.hi) < std::tie(r.lo, r.hi);
  });
  std::vector<FuzzyEdge> edges;
  for (std::size_t e = 0; e < entries.size();) {
    // At most two entries per pair: (i -> j) and (j -> i).
    double w = entries[e].w;
    std::size_t next = e + 1;
    if (next < entries.size() && entries[next].lo == entries[e].lo && entries[next].hi == entries[e].hi) {
      const double w2 = entries[next].w;
      w = w + w2 - w * w2;
      ++next;
    }
    edges.push_back({entries[e].lo, entries[e].hi, w});
    e = next;
  }
  if (sigmas) *sigmas = std::move(sigma);
  if (rhos) *rhos = std::move(rho);
  return edges;
}

JointEmbedding fit_graph_embedding(const DatasetGroup& group, const EmbeddingConfig& config) {
  const Matrix pooled = group.pooled();
  if (config.out_dims < 1 || config.out_dims >= group.cols()) {
    throw ValidationError("graph embedding output dimension " + std::to_string(config.out_dims) +
                          " must be in [1, " + std::to_string(group.cols() - 1) + "]");
  }
  if (config.n_neighbors < 1 || config.n_neighbors >= pooled.rows()) {
    throw ValidationError("n_neighbors=" + std::to_string(config.n_neighbors) +
                          " must be smaller than the pooled point count " +
                          std::to_string(pooled.rows()));
  }
  if (!(config.min_dist > 0.0)) throw ValidationError("min_dist must be positive");
  if (config.epochs < 1) throw ValidationError("epochs must be positive");
  if (config.label_repulsion < 0.0 || config.label_repulsion > 1.0) {
    throw ValidationError("label_repulsion must lie in [0, 1]");
  }
  if (config.supervised && !group.all_labeled()) {
    throw ValidationError("supervised embedding requires labels on every dataset");
  }

  Matrix work = pooled;
  if (config.pca_prereduce && *config.pca_prereduce < group.cols()) {
    if (*config.pca_prereduce < 1) throw ValidationError("pca_prereduce must be positive");
    const PcaBasis basis = fit_pca_basis_upto(pooled, *config.pca_prereduce);
    if (basis.components.cols() > 0) work = (pooled.rowwise() - basis.mean) * basis.components;
  }

  const KnnGraph knn = exact_knn(work, config.n_neighbors, config.point_metric);
  std::vector<FuzzyEdge> edges = fuzzy_graph(knn);

  if (config.supervised) {
    Labels pooled_labels;
    for (const auto& ds : group.datasets()) {
      pooled_labels.insert(pooled_labels.end(), ds.labels()->begin(), ds.labels()->end());
    }
    for (auto& e : edges) {
      if (pooled_labels[static_cast<std::size_t>(e.i)] != pooled_labels[static_cast<std::size_t>(e.j)]) {
        e.weight *= config.label_repulsion;
      }
    }
  }

  UnionFind uf(static_cast<std::size_t>(pooled.rows()));
  for (const auto& e : edges) {
    if (e.weight > 0.0) uf.unite(static_cast<std::size_t>(e.i), static_cast<std::size_t>(e.j));
  }
  std::size_t components = 0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(pooled.rows()); ++i) {
    if (uf.find(i) == i) ++components;
  }
  if (components > 1) {
    log_warning("neighbor graph has " + std::to_string(components) +
                " connected components; they keep their PCA placement relative to each other");
  }

  Matrix emb = initial_layout(work, config.out_dims, config.seed);
  const auto [a, b] = fit_curve_params(config.min_dist);
  optimize_layout(emb, edges, config, a, b);
  EmbeddingConfig cfg = config;
  cfg.method = EmbeddingMethod::graph;
  return shell_for(group, std::move(emb), cfg);
}

JointEmbedding import_embedding(const DatasetGroup& group, Matrix coordinates) {
  if (coordinates.rows() != group.total_rows()) {
    throw ShapeError("imported embedding has " + std::to_string(coordinates.rows()) +
                     " rows but the group pools " + std::to_string(group.total_rows()) + " points");
  }
  if (!coordinates.allFinite()) throw ValidationError("imported embedding has non-finite coordinates");
  EmbeddingConfig cfg;
  cfg.method = EmbeddingMethod::imported;
  cfg.out_dims = static_cast<int>(coordinates.cols());
  return shell_for(group, std::move(coordinates), cfg);
}

JointEmbedding import_embedding(const DatasetGroup& group, const std::filesystem::path& path) {
  return import_embedding(group, load_dataset(path, FileFormat::dsd).data());
}

DatasetGroup transform_groups(const JointEmbedding& embedding) {
  std::vector<Dataset> out;
  const auto k = embedding.dataset_offsets.size() - 1;
  out.reserve(k);
  for (std::size_t d = 0; d < k; ++d) {
    const Eigen::Index begin = embedding.dataset_offsets[d];
    const Eigen::Index end = embedding.dataset_offsets[d + 1];
    out.emplace_back(Matrix(embedding.coordinates.middleRows(begin, end - begin)),
                     embedding.labels.at(d), embedding.names.at(d));
  }
  return DatasetGroup(std::move(out));
}

}  // namespace dsetdist
