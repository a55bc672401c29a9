#include "dsetdist/bench.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "dsetdist/util.hpp"

namespace dsetdist {

namespace {

template <typename T>
T get_as(const Json& j, const std::string& key, const std::string& context) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ValidationError(context + "." + key + ": " + e.what());
  }
}

template <typename T>
void read_if(const Json& j, const std::string& key, const std::string& context, T& out) {
  if (j.contains(key)) out = get_as<T>(j, key, context);
}

void require_object(const Json& j, const std::string& context) {
  if (!j.is_object()) throw ValidationError(context + " must be a JSON object");
}

const std::vector<std::string> kSceneKeys{"n_bs_antennas", "n_subcarriers", "grid_width", "grid_height",
                                          "bs_position", "n_paths", "n_scatterers", "blockers",
                                          "carrier_ghz", "bandwidth_mhz", "seed", "tile_rows", "tile_cols", "timing_guard_taps"};

}  // namespace

void reject_unknown_keys(const Json& object, const std::vector<std::string>& allowed, const std::string& context) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError("unknown key '" + key + "' in " + context);
    }
  }
}

SceneConfig scene_config_from_json(const Json& j, std::uint64_t default_seed) {
  require_object(j, "scene");
  reject_unknown_keys(j, kSceneKeys, "scene");
  SceneConfig c;
  c.seed = default_seed;
  const std::string ctx = "scene";
  read_if(j, "n_bs_antennas", ctx, c.n_bs_antennas);
  read_if(j, "n_subcarriers", ctx, c.n_subcarriers);
  read_if(j, "grid_width", ctx, c.grid_width);
  read_if(j, "grid_height", ctx, c.grid_height);
  read_if(j, "bs_position", ctx, c.bs_position);
  read_if(j, "n_paths", ctx, c.n_paths);
  read_if(j, "n_scatterers", ctx, c.n_scatterers);
  read_if(j, "carrier_ghz", ctx, c.carrier_ghz);
  read_if(j, "bandwidth_mhz", ctx, c.bandwidth_mhz);
  read_if(j, "seed", ctx, c.seed);
  read_if(j, "tile_rows", ctx, c.tile_rows);
  read_if(j, "tile_cols", ctx, c.tile_cols);
  read_if(j, "timing_guard_taps", ctx, c.timing_guard_taps);
  if (j.contains("blockers")) {
    const auto rects = get_as<std::vector<std::array<double, 4>>>(j, "blockers", ctx);
    c.blockers.clear();
    for (const auto& r : rects) {
      if (!(r[0] < r[2] && r[1] < r[3])) throw ValidationError("scene.blockers: expected [x0, y0, x1, y1] with x0 < x1, y0 < y1");
      c.blockers.push_back({r[0], r[1], r[2], r[3]});
    }
  }
  c.validate();
  return c;
}

Json to_json(const SceneConfig& c) {
  Json blockers = Json::array();
  for (const auto& r : c.blockers) blockers.push_back({r.x0, r.y0, r.x1, r.y1});
  return Json{{"n_bs_antennas", c.n_bs_antennas}, {"n_subcarriers", c.n_subcarriers},
              {"grid_width", c.grid_width},       {"grid_height", c.grid_height},
              {"bs_position", c.bs_position},     {"n_paths", c.n_paths},
              {"n_scatterers", c.n_scatterers},   {"blockers", blockers},
              {"carrier_ghz", c.carrier_ghz},     {"bandwidth_mhz", c.bandwidth_mhz},
              {"seed", c.seed},                   {"tile_rows", c.tile_rows},
              {"tile_cols", c.tile_cols},         {"timing_guard_taps", c.timing_guard_taps}};
}

EmbeddingConfig embedding_config_from_json(const Json& j, std::uint64_t seed) {
  EmbeddingConfig c;
  c.seed = seed;
  if (j.is_null()) return c;
  require_object(j, "embedding");
  reject_unknown_keys(j, {"n_neighbors", "min_dist", "point_metric", "pca_prereduce", "epochs", "label_repulsion",
                          "negative_samples"},
                      "embedding");
  const std::string ctx = "embedding";
  read_if(j, "n_neighbors", ctx, c.n_neighbors);
  read_if(j, "min_dist", ctx, c.min_dist);
  read_if(j, "epochs", ctx, c.epochs);
  read_if(j, "label_repulsion", ctx, c.label_repulsion);
  read_if(j, "negative_samples", ctx, c.negative_samples);
  if (j.contains("point_metric")) c.point_metric = parse_point_metric(get_as<std::string>(j, "point_metric", ctx));
  if (j.contains("pca_prereduce")) {
    if (j["pca_prereduce"].is_null()) {
      c.pca_prereduce.reset();
    } else {
      c.pca_prereduce = get_as<int>(j, "pca_prereduce", ctx);
    }
  }
  return c;
}

std::string BenchMetric::descriptor() const { return space.to_string() + "/" + metric.to_string(); }

RunConfig RunConfig::from_json(const Json& j, const std::filesystem::path& base_dir, std::uint64_t default_seed) {
  require_object(j, "run config");
  reject_unknown_keys(j, {"datasets", "scene", "standardize", "task", "metrics", "embedding", "seed", "threads",
                          "include_diagonal"},
                      "run config");
  RunConfig rc;
  rc.source = j;
  rc.seed = default_seed;
  const std::string ctx = "config";
  read_if(j, "seed", ctx, rc.seed);
  read_if(j, "standardize", ctx, rc.standardize);
  read_if(j, "include_diagonal", ctx, rc.include_diagonal);
  if (j.contains("threads")) {
    rc.threads = get_as<int>(j, "threads", ctx);
    if (*rc.threads < 1) throw ValidationError("config.threads must be positive");
  }

  if (j.contains("datasets") == j.contains("scene")) {
    throw ValidationError("config needs exactly one of 'datasets' or 'scene'");
  }
  if (j.contains("datasets")) {
    for (const auto& p : get_as<std::vector<std::string>>(j, "datasets", ctx)) {
      const std::filesystem::path path(p);
      rc.dataset_paths.push_back(path.is_absolute() || base_dir.empty() ? path : base_dir / path);
    }
    if (rc.dataset_paths.size() < 2) throw ValidationError("config.datasets needs at least 2 entries");
  } else {
    const Json& s = j["scene"];
    require_object(s, "scene");
    std::vector<std::string> allowed = kSceneKeys;
    allowed.insert(allowed.end(), {"preprocess", "labels", "areas"});
    reject_unknown_keys(s, allowed, "scene");
    Json scene_only = Json::object();
    for (const auto& key : kSceneKeys) {
      if (s.contains(key)) scene_only[key] = s[key];
    }
    SceneSource src;
    src.scene = scene_config_from_json(scene_only, rc.seed);
    if (s.contains("preprocess")) src.preprocess = parse_preprocess(get_as<std::string>(s, "preprocess", "scene"));
    if (s.contains("labels")) src.labels = parse_scene_label(get_as<std::string>(s, "labels", "scene"));
    if (s.contains("areas")) src.areas = get_as<std::vector<int>>(s, "areas", "scene");
    rc.scene = std::move(src);
  }

  if (j.contains("task")) {
    const Json& t = j["task"];
    require_object(t, "task");
    reject_unknown_keys(t, {"kind", "rank"}, "task");
    if (t.contains("kind")) rc.task.kind = parse_task_kind(get_as<std::string>(t, "kind", "task"));
    read_if(t, "rank", "task", rc.task.rank);
    if (rc.task.rank < 1) throw ValidationError("task.rank must be positive");
  }
  if (rc.task.kind == TaskKind::beam_classification && rc.scene && rc.scene->labels == SceneLabel::none) {
    rc.scene->labels = SceneLabel::beam;
  }

  rc.embedding = embedding_config_from_json(j.contains("embedding") ? j["embedding"] : Json(), rc.seed);

  if (!j.contains("metrics")) throw ValidationError("config.metrics is required");
  const Json& ms = j["metrics"];
  if (!ms.is_array() || ms.empty()) throw ValidationError("config.metrics must be a non-empty array");
  for (const auto& m : ms) {
    BenchMetric bm;
    bm.params.seed = rc.seed;
    if (m.is_string()) {
      const auto text = m.get<std::string>();
      const auto slash = text.rfind('/');
      bm.space = SpaceSpec::parse(slash == std::string::npos ? "raw" : text.substr(0, slash));
      bm.metric = MetricSpec::parse(slash == std::string::npos ? text : text.substr(slash + 1));
    } else if (m.is_object()) {
      reject_unknown_keys(m, {"space", "metric", "bins", "clusters", "subspace_dim", "weights", "penalty_metric"},
                          "metrics entry");
      bm.space = SpaceSpec::parse(m.contains("space") ? get_as<std::string>(m, "space", "metrics entry") : "raw");
      bm.metric = MetricSpec::parse(get_as<std::string>(m, "metric", "metrics entry"));
      if (m.contains("bins")) bm.params.bins = get_as<int>(m, "bins", "metrics entry");
      read_if(m, "clusters", "metrics entry", bm.params.clusters);
      if (m.contains("subspace_dim")) bm.params.subspace_dim = get_as<int>(m, "subspace_dim", "metrics entry");
      if (m.contains("weights")) bm.params.weights = get_as<std::vector<double>>(m, "weights", "metrics entry");
      if (m.contains("penalty_metric")) {
        bm.params.penalty_metric = parse_point_metric(get_as<std::string>(m, "penalty_metric", "metrics entry"));
      }
    } else {
      throw ValidationError("config.metrics entries must be strings or objects");
    }
    if (bm.space.kind == SpaceSpec::Kind::imported && bm.space.import_path.is_relative() && !base_dir.empty()) {
      bm.space.import_path = base_dir / bm.space.import_path;
    }
    rc.metrics.push_back(std::move(bm));
  }
  return rc;
}

RunConfig RunConfig::load(const std::filesystem::path& path, std::uint64_t default_seed) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
  return from_json(j, path.parent_path(), default_seed);
}

DatasetGroup load_run_datasets(const RunConfig& config) {
  std::vector<Dataset> ds;
  if (config.scene) {
    const auto& src = *config.scene;
    const ChannelScene scene = generate_scene(src.scene);
    std::vector<int> areas;
    if (src.areas) {
      areas = *src.areas;
    } else {
      for (int a = 0; a < src.scene.n_tiles(); ++a) {
        if (std::count(scene.areas.begin(), scene.areas.end(), a) > 0) areas.push_back(a);
      }
    }
    for (int a : areas) ds.push_back(channels_to_dataset(scene, a, src.preprocess, src.labels));
  } else {
    for (const auto& p : config.dataset_paths) {
      Dataset d = load_dataset(p);
      if (d.name().empty()) d = d.with_name(p.stem().string());
      ds.push_back(std::move(d));
    }
  }
  DatasetGroup group(std::move(ds));
  return config.standardize ? standardize(group) : group;
}

std::vector<std::size_t> BenchResult::ranking() const {
  std::vector<std::size_t> order(metrics.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = metrics[a].correlation.pearson.value;
    const auto& pb = metrics[b].correlation.pearson.value;
    if (pa.has_value() != pb.has_value()) return pa.has_value();
    return pa.has_value() && *pa > *pb;
  });
  return order;
}

BenchResult run_bench(const RunConfig& config, const DatasetGroup& group) {
  if (config.threads) set_thread_count(static_cast<unsigned>(*config.threads));
  BenchResult result;
  for (const auto& d : group.datasets()) result.dataset_names.push_back(d.name());
  try {
    result.performance = performance_matrix(group, config.task);
  } catch (const std::exception& e) {
    result.errors.push_back({"task:" + to_string(config.task.kind), std::nullopt, std::nullopt, e.what()});
    return result;
  }

  // Each space is transformed once and shared by every metric measured in it.
  std::map<std::string, std::optional<DatasetGroup>> spaces;
  std::map<std::string, std::string> space_errors;
  for (const auto& m : config.metrics) {
    const std::string key = m.space.to_string();
    if (spaces.contains(key) || space_errors.contains(key)) continue;
    try {
      log_info("transforming into space " + key);
      spaces.emplace(key, apply_space(group, m.space, config.embedding));
    } catch (const std::exception& e) {
      space_errors.emplace(key, e.what());
    }
  }

  for (const auto& m : config.metrics) {
    const std::string key = m.space.to_string();
    if (const auto it = space_errors.find(key); it != space_errors.end()) {
      result.errors.push_back({m.descriptor(), std::nullopt, std::nullopt, "space " + key + ": " + it->second});
      continue;
    }
    try {
      log_info("computing " + m.descriptor());
      MetricResult mr;
      mr.descriptor = m.descriptor();
      mr.distances = distance_matrix_in_space(*spaces.at(key), m.metric, m.params, mr.descriptor);
      mr.correlation = correlate(mr.distances, *result.performance, config.include_diagonal);
      result.metrics.push_back(std::move(mr));
    } catch (const PairError& e) {
      result.errors.push_back({m.descriptor(), e.i(), e.j(), e.what()});
    } catch (const std::exception& e) {
      result.errors.push_back({m.descriptor(), std::nullopt, std::nullopt, e.what()});
    }
  }
  return result;
}

BenchResult run_bench(const RunConfig& config) { return run_bench(config, load_run_datasets(config)); }

}  // namespace dsetdist
