#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dsetdist/pipeline.hpp"
#include "dsetdist/synthgen.hpp"
#include "dsetdist/transfer.hpp"

namespace dsetdist {

using Json = nlohmann::json;

/// Throws ValidationError naming the first key of `object` not in `allowed`.
void reject_unknown_keys(const Json& object, const std::vector<std::string>& allowed, const std::string& context);

SceneConfig scene_config_from_json(const Json& j, std::uint64_t default_seed = 0);
Json to_json(const SceneConfig& config);

/// Embedding hyperparameters shared by every graph space in a run.
EmbeddingConfig embedding_config_from_json(const Json& j, std::uint64_t seed);

struct SceneSource {
  SceneConfig scene;
  Preprocess preprocess = Preprocess::angle_delay;
  SceneLabel labels = SceneLabel::none;
  std::optional<std::vector<int>> areas;  // default: every non-empty area
};

struct BenchMetric {
  SpaceSpec space;
  MetricSpec metric;
  MetricParams params;
  std::string descriptor() const;
};

/// Validated bench configuration. Every stochastic component is driven by `seed`.
struct RunConfig {
  Json source;                         // the document as given, echoed into reports
  std::vector<std::filesystem::path> dataset_paths;
  std::optional<SceneSource> scene;
  bool standardize = false;
  TaskParams task;
  std::vector<BenchMetric> metrics;
  EmbeddingConfig embedding;
  std::uint64_t seed = 0;
  std::optional<int> threads;
  bool include_diagonal = false;

  /// Relative dataset paths resolve against `base_dir`.
  static RunConfig from_json(const Json& j, const std::filesystem::path& base_dir = {},
                             std::uint64_t default_seed = 0);
  static RunConfig load(const std::filesystem::path& path, std::uint64_t default_seed = 0);
};

DatasetGroup load_run_datasets(const RunConfig& config);

struct BenchError {
  std::string metric;
  std::optional<std::size_t> i;
  std::optional<std::size_t> j;
  std::string message;
};

struct MetricResult {
  std::string descriptor;
  DistanceMatrix distances;
  CorrelationReport correlation;
};

struct BenchResult {
  std::vector<std::string> dataset_names;
  std::optional<PerformanceMatrix> performance;
  std::vector<MetricResult> metrics;
  std::vector<BenchError> errors;

  bool ok() const noexcept { return errors.empty(); }
  /// Indices into `metrics`, best Pearson first; undefined correlations last.
  std::vector<std::size_t> ranking() const;
};

/// Performance matrix once, then every configured metric; failures are
/// collected per metric (and pair) rather than aborting the run.
BenchResult run_bench(const RunConfig& config, const DatasetGroup& group);
BenchResult run_bench(const RunConfig& config);

}  // namespace dsetdist
