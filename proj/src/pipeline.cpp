#include "dsetdist/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <memory>

#include "dsetdist/geometric.hpp"
#include "dsetdist/histogram.hpp"
#include "dsetdist/statistical.hpp"
#include "dsetdist/subspace.hpp"
#include "dsetdist/util.hpp"

namespace dsetdist {

namespace {

int parse_dims(const std::string& text, std::size_t prefix) {
  int d = 0;
  const char* first = text.data() + prefix;
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, d);
  if (first == last || ec != std::errc{} || ptr != last || d < 1) {
    throw ValidationError("space '" + text + "' needs a positive dimension suffix");
  }
  return d;
}

bool starts_with(const std::string& s, std::string_view p) { return s.rfind(p, 0) == 0; }

}  // namespace

SpaceSpec SpaceSpec::parse(const std::string& text) {
  SpaceSpec s;
  if (text == "raw") return s;
  if (starts_with(text, "import:")) {
    s.kind = Kind::imported;
    s.import_path = text.substr(7);
    if (s.import_path.empty()) throw ValidationError("import space needs a path");
    return s;
  }
  if (starts_with(text, "sumap")) {
    s.kind = Kind::supervised_graph;
    s.dims = parse_dims(text, 5);
  } else if (starts_with(text, "umap")) {
    s.kind = Kind::graph;
    s.dims = parse_dims(text, 4);
  } else if (starts_with(text, "pca")) {
    s.kind = Kind::pca;
    s.dims = parse_dims(text, 3);
  } else {
    throw ValidationError("unknown space '" + text + "' (expected raw, pca<d>, umap<d>, sumap<d> or import:<path>)");
  }
  return s;
}

std::string SpaceSpec::to_string() const {
  switch (kind) {
    case Kind::raw: return "raw";
    case Kind::pca: return "pca" + std::to_string(dims);
    case Kind::graph: return "umap" + std::to_string(dims);
    case Kind::supervised_graph: return "sumap" + std::to_string(dims);
    case Kind::imported: return "import:" + import_path.generic_string();
  }
  return "raw";
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{
      "pairwise_euclidean", "cluster_euclidean", "centroid_euclidean", "cosine",
      "kl", "js", "hellinger", "tv", "wasserstein", "ks", "energy", "mmd_linear", "mmd_rbf",
      "grassmann", "chordal", "asimov", "pad", "constant"};
  return names;
}

MetricSpec MetricSpec::parse(const std::string& text) {
  MetricSpec m;
  m.base = text;
  if (starts_with(text, "label_aware:")) {
    m.label_aware = true;
    m.base = text.substr(12);
  }
  const auto& names = metric_names();
  if (std::find(names.begin(), names.end(), m.base) == names.end()) {
    std::string all;
    for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
    throw ValidationError("unknown metric '" + text + "'; known: " + all + " (optionally prefixed label_aware:)");
  }
  return m;
}

std::string MetricSpec::to_string() const { return label_aware ? "label_aware:" + base : base; }

bool MetricSpec::symmetric() const { return base != "kl"; }

BaseDistance make_distance(const std::string& base, const MetricParams& p) {
  auto histogram = [&p](double (*f)(const JointHistogramPair&)) -> BaseDistance {
    return [f, bins = p.bins](const Dataset& a, const Dataset& b) { return f(joint_histograms(a, b, bins)); };
  };
  auto subspace = [&p](double (*f)(const PrincipalAngles&)) -> BaseDistance {
    return [f, dim = p.subspace_dim](const Dataset& a, const Dataset& b) {
      return f(principal_angles(a, b, dim.value_or(default_subspace_dim(a.cols()))));
    };
  };
  if (base == "pairwise_euclidean") return pairwise_euclidean;
  if (base == "centroid_euclidean") return centroid_euclidean;
  if (base == "cluster_euclidean") {
    return [k = p.clusters, seed = p.seed](const Dataset& a, const Dataset& b) {
      return cluster_euclidean(a, b, k, seed);
    };
  }
  if (base == "cosine") return cosine_distance;
  if (base == "kl") return histogram(kl_divergence);
  if (base == "js") return histogram(jensen_shannon);
  if (base == "hellinger") return histogram(hellinger);
  if (base == "tv") return histogram(total_variation);
  if (base == "wasserstein" || base == "ks") {
    const bool w1 = base == "wasserstein";
    return [w1, weights = p.weights](const Dataset& a, const Dataset& b) {
      std::optional<std::span<const double>> w;
      if (weights) w = std::span<const double>(weights->data(), weights->size());
      return w1 ? wasserstein1(a, b, w).mean : kolmogorov_smirnov(a, b, w).mean;
    };
  }
  if (base == "energy") return energy_distance;
  if (base == "mmd_linear") return [](const Dataset& a, const Dataset& b) { return mmd(a, b, MmdKernel::linear); };
  if (base == "mmd_rbf") return [](const Dataset& a, const Dataset& b) { return mmd(a, b, MmdKernel::rbf); };
  if (base == "grassmann") return subspace(grassmann);
  if (base == "chordal") return subspace(chordal);
  if (base == "asimov") return subspace(asimov);
  if (base == "pad") {
    return [seed = p.seed](const Dataset& a, const Dataset& b) { return proxy_a_distance(a, b, seed); };
  }
  if (base == "constant") return [](const Dataset&, const Dataset&) { return 1.0; };
  throw ValidationError("unknown metric '" + base + "'");
}

DatasetGroup apply_space(const DatasetGroup& group, const SpaceSpec& space, const EmbeddingConfig& embedding) {
  switch (space.kind) {
    case SpaceSpec::Kind::raw: return group;
    case SpaceSpec::Kind::pca: return transform_groups(fit_pca(group, space.dims));
    case SpaceSpec::Kind::graph:
    case SpaceSpec::Kind::supervised_graph: {
      EmbeddingConfig c = embedding;
      c.method = EmbeddingMethod::graph;
      c.out_dims = space.dims;
      c.supervised = space.kind == SpaceSpec::Kind::supervised_graph;
      return transform_groups(fit_graph_embedding(group, c));
    }
    case SpaceSpec::Kind::imported: return transform_groups(import_embedding(group, space.import_path));
  }
  return group;
}

PairError::PairError(std::string metric, std::size_t i, std::size_t j, const std::string& what)
    : Error(metric + " on pair (" + std::to_string(i) + ", " + std::to_string(j) + "): " + what),
      metric_(std::move(metric)),
      i_(i),
      j_(j) {}

DistanceMatrix distance_matrix_in_space(const DatasetGroup& g, const MetricSpec& metric, const MetricParams& params,
                                        std::string descriptor) {
  if (params.weights && static_cast<Eigen::Index>(params.weights->size()) != g.cols()) {
    throw ValidationError("weights have " + std::to_string(params.weights->size()) + " entries but the space has " +
                          std::to_string(g.cols()) + " features");
  }
  if (descriptor.empty()) descriptor = metric.to_string();
  const BaseDistance base = make_distance(metric.base, params);
  BaseDistance fn = base;
  if (metric.label_aware) {
    auto table = std::make_shared<LabelPenaltyTable>(penalty_table(g, params.penalty_metric));
    fn = [table, base](const Dataset& a, const Dataset& b) { return label_aware_distance(a, b, *table, base); };
  }

  const std::size_t k = g.size();
  const bool sym = metric.symmetric();
  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = sym ? i : 0; j < k; ++j) work.emplace_back(i, j);
  }
  std::vector<double> values(work.size(), 0.0);
  std::vector<std::string> errors(work.size());
  parallel_for(work.size(), [&](std::size_t w) {
    const auto [i, j] = work[w];
    try {
      values[w] = fn(g[i], g[j]);
    } catch (const std::exception& e) {
      errors[w] = e.what();
      if (errors[w].empty()) errors[w] = "unknown error";
    }
  });
  for (std::size_t w = 0; w < work.size(); ++w) {
    if (!errors[w].empty()) throw PairError(descriptor, work[w].first, work[w].second, errors[w]);
  }

  DistanceMatrix dm;
  dm.values.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t w = 0; w < work.size(); ++w) {
    const auto i = static_cast<Eigen::Index>(work[w].first);
    const auto j = static_cast<Eigen::Index>(work[w].second);
    dm.values(i, j) = values[w];
    if (sym) dm.values(j, i) = values[w];
  }
  dm.symmetric = sym;
  dm.descriptor = std::move(descriptor);
  return dm;
}

std::string Pipeline::descriptor() const { return space.to_string() + "/" + metric.to_string(); }

DistanceMatrix distance_matrix(const DatasetGroup& group, const Pipeline& pipeline) {
  const DatasetGroup transformed = apply_space(group, pipeline.space, pipeline.embedding);
  return distance_matrix_in_space(transformed, pipeline.metric, pipeline.params, pipeline.descriptor());
}

}  // namespace dsetdist
