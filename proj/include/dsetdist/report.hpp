#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dsetdist/bench.hpp"

namespace dsetdist {

Json matrix_to_json(const Eigen::MatrixXd& m);
Json to_json(const Correlation& c);

/// Full bench report. Everything except "generated_at" is a pure function of
/// the config and the data.
Json report_json(const RunConfig& config, const BenchResult& result, bool timestamp = true);

/// Machine-readable list of (metric, pair, message) failures.
Json errors_json(const BenchResult& result);

/// Plain-text table of metrics ordered by Pearson correlation.
std::string ranking_table(const Json& report);

std::string svg_scatter(const std::vector<std::pair<double, double>>& points, const std::string& title);
std::string svg_heatmap(const Eigen::MatrixXd& m, const std::vector<std::string>& names, const std::string& title);

/// scatter_<i>.svg and distance_<i>.svg per metric, plus drop.svg.
std::vector<std::filesystem::path> write_svgs(const Json& report, const std::filesystem::path& dir);

/// One DSD file per non-empty area plus manifest.json; returns the manifest.
Json write_scene(const ChannelScene& scene, Preprocess preprocess, SceneLabel labels,
                 const std::filesystem::path& dir);

}  // namespace dsetdist
