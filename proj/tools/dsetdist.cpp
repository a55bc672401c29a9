// dsetdist: dataset distances, transfer proxies and correlation reports.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dsetdist/bench.hpp"
#include "dsetdist/pipeline.hpp"
#include "dsetdist/report.hpp"
#include "dsetdist/synthgen.hpp"
#include "dsetdist/util.hpp"

namespace fs = std::filesystem;
using namespace dsetdist;

namespace {

struct Globals {
  std::optional<unsigned> threads;
  std::uint64_t seed = 0;
  std::string log_level = "warning";
};

struct EmbeddingFlags {
  int n_neighbors = 32;
  double min_dist = 0.1;
  int epochs = 200;
  std::string point_metric = "euclidean";
  int pca_prereduce = 100;
  double label_repulsion = 0.1;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--neighbors", n_neighbors, "Graph embedding neighbors")->capture_default_str();
    cmd->add_option("--min-dist", min_dist, "Graph embedding min_dist")->capture_default_str();
    cmd->add_option("--epochs", epochs, "Graph embedding epochs")->capture_default_str();
    cmd->add_option("--point-metric", point_metric, "euclidean or correlation")->capture_default_str();
    cmd->add_option("--pca-prereduce", pca_prereduce, "PCA dims before the graph (0 disables)")->capture_default_str();
    cmd->add_option("--label-repulsion", label_repulsion, "Cross-label edge factor (sumap)")->capture_default_str();
  }

  EmbeddingConfig to_config(std::uint64_t seed) const {
    EmbeddingConfig c;
    c.n_neighbors = n_neighbors;
    c.min_dist = min_dist;
    c.epochs = epochs;
    c.point_metric = parse_point_metric(point_metric);
    c.pca_prereduce = pca_prereduce > 0 ? std::optional<int>(pca_prereduce) : std::nullopt;
    c.label_repulsion = label_repulsion;
    c.seed = seed;
    return c;
  }
};

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

DatasetGroup load_group(const std::vector<std::string>& files) {
  std::vector<Dataset> ds;
  for (const auto& f : files) {
    Dataset d = load_dataset(f);
    if (d.name().empty()) d = d.with_name(fs::path(f).stem().string());
    ds.push_back(std::move(d));
  }
  return DatasetGroup(std::move(ds));
}

void print_error_list(const Json& errors) {
  std::cerr << Json{{"errors", errors}}.dump(2) << "\n";
}

int run_gen(const Globals& g, const std::string& config_path, const fs::path& out, std::string preprocess,
            std::string labels) {
  Json j = config_path.empty() ? Json::object() : read_json(config_path);
  if (!j.is_object()) throw ValidationError("scene config must be a JSON object");
  // Config file overrides flags.
  if (j.contains("preprocess")) {
    preprocess = j["preprocess"].get<std::string>();
    j.erase("preprocess");
  }
  if (j.contains("labels")) {
    labels = j["labels"].get<std::string>();
    j.erase("labels");
  }
  const SceneConfig config = scene_config_from_json(j, g.seed);
  const ChannelScene scene = generate_scene(config);
  const Json manifest = write_scene(scene, parse_preprocess(preprocess), parse_scene_label(labels), out);
  std::cout << "wrote " << manifest["areas"].size() << " areas, " << scene.users() << " users to " << out.string()
            << "\n";
  return 0;
}

int run_dist(const Globals& g, const std::vector<std::string>& files, const std::string& metric, std::string space,
             const std::string& import_path, const MetricParams& params, const EmbeddingFlags& ef, bool as_json) {
  if (!import_path.empty()) space = "import:" + import_path;
  Pipeline p;
  p.space = SpaceSpec::parse(space);
  p.metric = MetricSpec::parse(metric);
  p.params = params;
  p.params.seed = g.seed;
  p.embedding = ef.to_config(g.seed);
  const DatasetGroup group = load_group(files);
  const DistanceMatrix dm = distance_matrix(group, p);
  if (as_json) {
    std::vector<std::string> names;
    for (const auto& d : group.datasets()) names.push_back(d.name());
    std::cout << Json{{"metric", p.descriptor()}, {"datasets", names}, {"distance", matrix_to_json(dm.values)}}.dump(2)
              << "\n";
  } else if (group.size() == 2) {
    std::printf("%.17g\n", dm.values(0, 1));
  } else {
    for (Eigen::Index i = 0; i < dm.values.rows(); ++i) {
      for (Eigen::Index j = 0; j < dm.values.cols(); ++j) std::printf("%s%.17g", j ? "\t" : "", dm.values(i, j));
      std::printf("\n");
    }
  }
  return 0;
}

int run_embed(const Globals& g, const std::vector<std::string>& files, const std::string& space, const fs::path& out,
              const EmbeddingFlags& ef) {
  const SpaceSpec spec = SpaceSpec::parse(space);
  if (spec.kind == SpaceSpec::Kind::raw || spec.kind == SpaceSpec::Kind::imported) {
    throw ValidationError("embed needs a pca<d>, umap<d> or sumap<d> space");
  }
  const DatasetGroup embedded = apply_space(load_group(files), spec, ef.to_config(g.seed));
  fs::create_directories(out);
  for (const auto& d : embedded.datasets()) save_dataset(d, out / (d.name() + ".dsd"), FileFormat::dsd);
  save_dataset(Dataset(embedded.pooled(), std::nullopt, "pooled"), out / "coordinates.dsd", FileFormat::dsd);
  std::cout << "wrote " << embedded.size() << " embedded datasets (" << embedded.cols() << " dims) to "
            << out.string() << "\n";
  return 0;
}

int run_bench_cmd(const Globals& g, const fs::path& config_path, const fs::path& out, const std::string& svg_dir) {
  const RunConfig config = RunConfig::load(config_path, g.seed);
  const BenchResult result = run_bench(config);
  const Json report = report_json(config, result);
  if (!out.empty()) write_file(out, report.dump(2) + "\n");
  if (!svg_dir.empty()) write_svgs(report, svg_dir);
  std::cout << ranking_table(report);
  if (!result.ok()) {
    print_error_list(errors_json(result));
    return 1;
  }
  return 0;
}

int run_report(const fs::path& in, const std::string& svg_dir) {
  const Json report = read_json(in);
  std::cout << ranking_table(report);
  if (!svg_dir.empty()) {
    for (const auto& p : write_svgs(report, svg_dir)) std::cout << "wrote " << p.string() << "\n";
  }
  return report.at("errors").empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dataset distances and transferability correlation for wireless datasets"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (default: DSETDIST_THREADS, then all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for every stochastic component")->capture_default_str();
  app.add_option("--log-level", g.log_level, "quiet, warning or info")
      ->check(CLI::IsMember({"quiet", "warning", "info"}))
      ->capture_default_str();

  auto* gen = app.add_subcommand("gen", "Generate a synthetic channel scene, one dataset per area");
  std::string gen_config;
  fs::path gen_out;
  std::string gen_preprocess = "angle_delay";
  std::string gen_labels = "beam";
  gen->add_option("--config", gen_config, "Scene JSON")->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--preprocess", gen_preprocess, "raw or angle_delay")->capture_default_str();
  gen->add_option("--labels", gen_labels, "none, los or beam")->capture_default_str();

  auto* dist = app.add_subcommand("dist", "Distance between two datasets, or the matrix over several");
  std::vector<std::string> dist_files;
  std::string dist_metric;
  std::string dist_space = "raw";
  std::string dist_import;
  bool dist_json = false;
  MetricParams dist_params;
  EmbeddingFlags dist_embedding;
  dist->add_option("files", dist_files, "Datasets (.dsd or .csv)")->required()->expected(2, -1);
  dist->add_option("--metric", dist_metric, "Metric name, optionally label_aware:<name>")->required();
  dist->add_option("--space", dist_space, "raw, pca<d>, umap<d>, sumap<d> or import:<path>")->capture_default_str();
  dist->add_option("--import-embedding", dist_import, "Pooled coordinates (.dsd) computed elsewhere");
  dist->add_option("--bins", dist_params.bins, "Histogram bins");
  dist->add_option("--clusters", dist_params.clusters, "k for cluster_euclidean")->capture_default_str();
  dist->add_option("--subspace-dim", dist_params.subspace_dim, "Subspace dimension");
  dist->add_flag("--json", dist_json, "Print JSON");
  dist_embedding.add_to(dist);

  auto* embed = app.add_subcommand("embed", "Fit a joint embedding and write embedded datasets");
  std::vector<std::string> embed_files;
  std::string embed_space = "umap2";
  fs::path embed_out;
  EmbeddingFlags embed_embedding;
  embed->add_option("files", embed_files, "Datasets (.dsd or .csv)")->required()->expected(2, -1);
  embed->add_option("--space", embed_space, "pca<d>, umap<d> or sumap<d>")->capture_default_str();
  embed->add_option("--out", embed_out, "Output directory")->required();
  embed_embedding.add_to(embed);

  auto* bench = app.add_subcommand("bench", "Performance matrix, every configured metric, correlations");
  fs::path bench_config;
  fs::path bench_out;
  std::string bench_svg;
  bench->add_option("--config", bench_config, "Run config JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "Report JSON path");
  bench->add_option("--svg", bench_svg, "Directory for SVG plots");

  auto* report = app.add_subcommand("report", "Render a saved bench report");
  fs::path report_in;
  std::string report_svg;
  report->add_option("report", report_in, "Report JSON")->required()->check(CLI::ExistingFile);
  report->add_option("--svg", report_svg, "Directory for SVG plots");

  CLI11_PARSE(app, argc, argv);

  set_log_level(g.log_level == "quiet" ? LogLevel::quiet : g.log_level == "info" ? LogLevel::info : LogLevel::warning);
  if (g.threads) set_thread_count(*g.threads);

  try {
    if (*gen) return run_gen(g, gen_config, gen_out, gen_preprocess, gen_labels);
    if (*dist) {
      return run_dist(g, dist_files, dist_metric, dist_space, dist_import, dist_params, dist_embedding, dist_json);
    }
    if (*embed) return run_embed(g, embed_files, embed_space, embed_out, embed_embedding);
    if (*bench) return run_bench_cmd(g, bench_config, bench_out, bench_svg);
    if (*report) return run_report(report_in, report_svg);
  } catch (const ValidationError& e) {
    print_error_list(Json::array({Json{{"kind", "validation"}, {"message", e.what()}}}));
    return 2;
  } catch (const std::exception& e) {
    print_error_list(Json::array({Json{{"kind", "error"}, {"message", e.what()}}}));
    return 1;
  }
  return 0;
}
