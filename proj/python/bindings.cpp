// Thin pybind11 layer. JSON crosses the boundary as text; the Python package
// wraps these with dict conveniences.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dsetdist/bench.hpp"
#include "dsetdist/embedding.hpp"
#include "dsetdist/pipeline.hpp"
#include "dsetdist/report.hpp"
#include "dsetdist/synthgen.hpp"
#include "dsetdist/transfer.hpp"
#include "dsetdist/util.hpp"

namespace py = pybind11;
using namespace dsetdist;

namespace {

using LabelList = std::optional<std::vector<std::optional<Labels>>>;

DatasetGroup make_group(const std::vector<Matrix>& xs, const LabelList& labels) {
  if (labels && labels->size() != xs.size()) throw ValidationError("labels must have one entry per dataset");
  std::vector<Dataset> ds;
  ds.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ds.emplace_back(xs[i], labels ? (*labels)[i] : std::nullopt, "d" + std::to_string(i));
  }
  return DatasetGroup(std::move(ds));
}

MetricParams make_params(std::optional<int> bins, int clusters, std::optional<int> subspace_dim, std::uint64_t seed) {
  MetricParams p;
  p.bins = bins;
  p.clusters = clusters;
  p.subspace_dim = subspace_dim;
  p.seed = seed;
  return p;
}

Eigen::MatrixXd matrix_for(const DatasetGroup& group, const std::string& descriptor, const MetricParams& params,
                           std::uint64_t seed) {
  const auto slash = descriptor.find('/');
  Pipeline p;
  p.space = SpaceSpec::parse(slash == std::string::npos ? "raw" : descriptor.substr(0, slash));
  p.metric = MetricSpec::parse(slash == std::string::npos ? descriptor : descriptor.substr(slash + 1));
  p.params = params;
  p.embedding.seed = seed;
  return distance_matrix(group, p).values;
}

py::tuple dataset_tuple(const Dataset& d) {
  return py::make_tuple(Matrix(d.data()), d.labels() ? py::cast(*d.labels()) : py::object(py::none()));
}

}  // namespace

PYBIND11_MODULE(_dsetdist, m) {
  m.doc() = "Dataset distance engine for wireless datasets";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());

  m.def("metric_names", &metric_names);

  m.def(
      "distance_matrix",
      [](const std::vector<Matrix>& xs, const std::string& descriptor, const LabelList& labels,
         std::optional<int> bins, int clusters, std::optional<int> subspace_dim, std::uint64_t seed) {
        return matrix_for(make_group(xs, labels), descriptor, make_params(bins, clusters, subspace_dim, seed), seed);
      },
      py::arg("datasets"), py::arg("descriptor"), py::arg("labels") = py::none(), py::arg("bins") = py::none(),
      py::arg("clusters") = 3, py::arg("subspace_dim") = py::none(), py::arg("seed") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "distance",
      [](const Matrix& a, const Matrix& b, const std::string& descriptor, std::optional<Labels> labels_a,
         std::optional<Labels> labels_b, std::optional<int> bins, int clusters, std::optional<int> subspace_dim,
         std::uint64_t seed) {
        LabelList labels;
        if (labels_a || labels_b) labels = std::vector<std::optional<Labels>>{labels_a, labels_b};
        return matrix_for(make_group({a, b}, labels), descriptor, make_params(bins, clusters, subspace_dim, seed),
                          seed)(0, 1);
      },
      py::arg("a"), py::arg("b"), py::arg("descriptor") = "wasserstein", py::arg("labels_a") = py::none(),
      py::arg("labels_b") = py::none(), py::arg("bins") = py::none(), py::arg("clusters") = 3,
      py::arg("subspace_dim") = py::none(), py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());

  m.def(
      "embed",
      [](const std::vector<Matrix>& xs, const LabelList& labels, int dims, bool supervised, int n_neighbors,
         const std::string& point_metric, int epochs, std::uint64_t seed) {
        EmbeddingConfig c;
        c.out_dims = dims;
        c.supervised = supervised;
        c.n_neighbors = n_neighbors;
        c.point_metric = parse_point_metric(point_metric);
        c.epochs = epochs;
        c.seed = seed;
        const JointEmbedding e = fit_graph_embedding(make_group(xs, labels), c);
        return std::make_pair(e.coordinates, e.dataset_offsets);
      },
      py::arg("datasets"), py::arg("labels") = py::none(), py::arg("dims") = 2, py::arg("supervised") = false,
      py::arg("n_neighbors") = 32, py::arg("point_metric") = "euclidean", py::arg("epochs") = 200,
      py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());

  m.def(
      "performance",
      [](const std::vector<Matrix>& xs, const LabelList& labels, const std::string& task, int rank) {
        const PerformanceMatrix pm = performance_matrix(make_group(xs, labels), {parse_task_kind(task), rank});
        return std::make_pair(pm.scores, pm.drop);
      },
      py::arg("datasets"), py::arg("labels") = py::none(), py::arg("task") = "reconstruction",
      py::arg("rank") = 32, py::call_guard<py::gil_scoped_release>());

  m.def(
      "load_dataset", [](const std::filesystem::path& path) { return dataset_tuple(load_dataset(path)); },
      py::arg("path"));

  m.def(
      "save_dataset",
      [](const std::filesystem::path& path, const Matrix& x, std::optional<Labels> labels) {
        save_dataset(Dataset(x, std::move(labels)), path);
      },
      py::arg("path"), py::arg("x"), py::arg("labels") = py::none());

  m.def(
      "scene_dataset",
      [](int area, const std::string& scene_json, const std::string& preprocess, const std::string& labels) {
        Dataset d = [&] {
          py::gil_scoped_release release;
          const ChannelScene s = generate_scene(scene_config_from_json(Json::parse(scene_json)));
          return channels_to_dataset(s, area, parse_preprocess(preprocess), parse_scene_label(labels));
        }();
        return dataset_tuple(d);
      },
      py::arg("area"), py::arg("scene_json") = "{}", py::arg("preprocess") = "angle_delay",
      py::arg("labels") = "beam");

  m.def(
      "bench_json",
      [](const std::string& config_json, const std::filesystem::path& base_dir, bool timestamp) {
        const RunConfig config = RunConfig::from_json(Json::parse(config_json), base_dir);
        return report_json(config, run_bench(config), timestamp).dump();
      },
      py::arg("config_json"), py::arg("base_dir") = std::filesystem::path{}, py::arg("timestamp") = false,
      py::call_guard<py::gil_scoped_release>());

  m.def("set_thread_count", &set_thread_count, py::arg("threads"));
}
