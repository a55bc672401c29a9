#include "dsetdist/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

namespace dsetdist {

namespace {

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

constexpr const char* kSvgHeader = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\" width=\"640\" height=\"480\" font-family=\"sans-serif\">\n";

}  // namespace

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const Correlation& c) {
  if (c.value) return Json{{"value", *c.value}};
  return Json{{"value", nullptr}, {"note", c.note}};
}

Json errors_json(const BenchResult& result) {
  Json out = Json::array();
  for (const auto& e : result.errors) {
    Json item{{"metric", e.metric}, {"message", e.message}};
    item["pair"] = e.i && e.j ? Json::array({*e.i, *e.j}) : Json(nullptr);
    out.push_back(std::move(item));
  }
  return out;
}

Json report_json(const RunConfig& config, const BenchResult& result, bool timestamp) {
  Json r;
  r["config"] = config.source;
  Json task{{"kind", to_string(config.task.kind)}};
  if (config.task.kind == TaskKind::reconstruction) task["rank"] = config.task.rank;
  if (result.performance) task["score"] = to_string(result.performance->loss_kind);
  r["task"] = task;
  r["K"] = result.dataset_names.size();
  r["datasets"] = result.dataset_names;
  r["include_diagonal"] = config.include_diagonal;
  r["performance"] = result.performance
                         ? Json{{"scores", matrix_to_json(result.performance->scores)},
                                {"drop", matrix_to_json(result.performance->drop)}}
                         : Json(nullptr);
  Json metrics = Json::array();
  for (const auto& m : result.metrics) {
    Json scatter = Json::array();
    for (const auto& [d, p] : m.correlation.scatter) scatter.push_back({d, p});
    metrics.push_back(Json{{"metric", m.descriptor},
                           {"symmetric", m.distances.symmetric},
                           {"pearson", to_json(m.correlation.pearson)},
                           {"spearman", to_json(m.correlation.spearman)},
                           {"n_pairs", m.correlation.n_pairs},
                           {"distance", matrix_to_json(m.distances.values)},
                           {"scatter", std::move(scatter)}});
  }
  r["metrics"] = std::move(metrics);
  Json ranking = Json::array();
  for (std::size_t i : result.ranking()) ranking.push_back(result.metrics[i].descriptor);
  r["ranking"] = std::move(ranking);
  r["errors"] = errors_json(result);
  if (timestamp) r["generated_at"] = utc_now();
  return r;
}

std::string ranking_table(const Json& report) {
  std::map<std::string, const Json*> by_name;
  std::size_t width = 6;
  for (const auto& m : report.at("metrics")) {
    by_name[m.at("metric").get<std::string>()] = &m;
    width = std::max(width, m.at("metric").get<std::string>().size());
  }
  auto cell = [](const Json& c) {
    return c.at("value").is_null() ? std::string("undefined") : fmt(c.at("value").get<double>(), "%+.4f");
  };
  std::ostringstream out;
  out << "task: " << report.at("task").at("kind").get<std::string>() << "  K = " << report.at("K").get<int>() << "\n";
  char line[512];
  std::snprintf(line, sizeof line, "%-4s  %-*s  %10s  %10s\n", "rank", static_cast<int>(width), "metric", "pearson",
                "spearman");
  out << line;
  int rank = 1;
  for (const auto& name : report.at("ranking")) {
    const Json& m = *by_name.at(name.get<std::string>());
    std::snprintf(line, sizeof line, "%-4d  %-*s  %10s  %10s\n", rank++, static_cast<int>(width),
                  name.get<std::string>().c_str(), cell(m.at("pearson")).c_str(), cell(m.at("spearman")).c_str());
    out << line;
  }
  for (const auto& e : report.at("errors")) {
    out << "error  " << e.at("metric").get<std::string>() << ": " << e.at("message").get<std::string>() << "\n";
  }
  return out.str();
}

std::string svg_scatter(const std::vector<std::pair<double, double>>& points, const std::string& title) {
  constexpr double x0 = 70, x1 = 610, y0 = 420, y1 = 50;
  double dmin = 0, dmax = 1, pmin = 0, pmax = 1;
  if (!points.empty()) {
    dmin = dmax = points.front().first;
    pmin = pmax = points.front().second;
    for (const auto& [d, p] : points) {
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
      pmin = std::min(pmin, p);
      pmax = std::max(pmax, p);
    }
  }
  if (dmax <= dmin) dmax = dmin + 1.0;
  if (pmax <= pmin) pmax = pmin + 1.0;
  auto sx = [&](double d) { return x0 + (d - dmin) / (dmax - dmin) * (x1 - x0); };
  auto sy = [&](double p) { return y0 + (p - pmin) / (pmax - pmin) * (y1 - y0); };

  std::ostringstream s;
  s << kSvgHeader << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  s << "<text x=\"320\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title) << "</text>\n";
  s << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n";
  s << "<text x=\"340\" y=\"465\" text-anchor=\"middle\" font-size=\"13\">distance</text>\n";
  s << "<text x=\"18\" y=\"235\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 235)\">performance drop</text>\n";
  s << "<text x=\"" << x0 << "\" y=\"438\" font-size=\"11\" text-anchor=\"middle\">" << fmt(dmin) << "</text>\n";
  s << "<text x=\"" << x1 << "\" y=\"438\" font-size=\"11\" text-anchor=\"middle\">" << fmt(dmax) << "</text>\n";
  s << "<text x=\"64\" y=\"" << y0 << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(pmin) << "</text>\n";
  s << "<text x=\"64\" y=\"" << y1 + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(pmax) << "</text>\n";
  for (const auto& [d, p] : points) {
    s << "<circle cx=\"" << fmt(sx(d), "%.2f") << "\" cy=\"" << fmt(sy(p), "%.2f")
      << "\" r=\"4\" fill=\"#1f77b4\" fill-opacity=\"0.7\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string svg_heatmap(const Eigen::MatrixXd& m, const std::vector<std::string>& names, const std::string& title) {
  constexpr double left = 110, top = 50, size = 360;
  const auto k = std::max<Eigen::Index>(1, m.rows());
  const double cell = size / static_cast<double>(k);
  const double lo = m.size() ? m.minCoeff() : 0.0;
  double hi = m.size() ? m.maxCoeff() : 1.0;
  if (hi <= lo) hi = lo + 1.0;

  std::ostringstream s;
  s << kSvgHeader << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  s << "<text x=\"320\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title) << "</text>\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double t = (m(i, j) - lo) / (hi - lo);
      const int r = static_cast<int>(std::lround(255 - t * (255 - 31)));
      const int g = static_cast<int>(std::lround(255 - t * (255 - 119)));
      const int b = static_cast<int>(std::lround(255 - t * (255 - 180)));
      char color[8];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", r, g, b);
      s << "<rect x=\"" << fmt(left + static_cast<double>(j) * cell, "%.2f") << "\" y=\""
        << fmt(top + static_cast<double>(i) * cell, "%.2f") << "\" width=\"" << fmt(cell, "%.2f") << "\" height=\""
        << fmt(cell, "%.2f") << "\" fill=\"" << color << "\"><title>" << fmt(m(i, j), "%.6g") << "</title></rect>\n";
    }
    const std::string label = static_cast<std::size_t>(i) < names.size() ? names[static_cast<std::size_t>(i)] : std::to_string(i);
    s << "<text x=\"" << left - 6 << "\" y=\"" << fmt(top + (static_cast<double>(i) + 0.6) * cell, "%.2f")
      << "\" font-size=\"10\" text-anchor=\"end\">" << xml_escape(label) << "</text>\n";
  }
  s << "<text x=\"" << left + size + 20 << "\" y=\"" << top + 10 << "\" font-size=\"11\">max " << fmt(hi) << "</text>\n";
  s << "<text x=\"" << left + size + 20 << "\" y=\"" << top + size << "\" font-size=\"11\">min " << fmt(lo) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::vector<std::filesystem::path> write_svgs(const Json& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto names = report.at("datasets").get<std::vector<std::string>>();
  if (!report.at("performance").is_null()) {
    const auto path = dir / "drop.svg";
    write_text(path, svg_heatmap(matrix_from_json(report["performance"]["drop"]), names, "performance drop"));
    written.push_back(path);
  }
  std::size_t i = 0;
  for (const auto& m : report.at("metrics")) {
    const auto title = m.at("metric").get<std::string>();
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : m.at("scatter")) pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    const auto scatter = dir / ("scatter_" + std::to_string(i) + ".svg");
    const auto heat = dir / ("distance_" + std::to_string(i) + ".svg");
    write_text(scatter, svg_scatter(pts, title));
    write_text(heat, svg_heatmap(matrix_from_json(m.at("distance")), names, title));
    written.push_back(scatter);
    written.push_back(heat);
    ++i;
  }
  return written;
}

Json write_scene(const ChannelScene& scene, Preprocess preprocess, SceneLabel labels, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Json areas = Json::array();
  for (int a = 0; a < scene.config.n_tiles(); ++a) {
    const auto count = std::count(scene.areas.begin(), scene.areas.end(), a);
    Json entry{{"area", a}, {"count", count}};
    if (count == 0) {
      entry["file"] = nullptr;
      areas.push_back(std::move(entry));
      continue;
    }
    const Dataset ds = channels_to_dataset(scene, a, preprocess, labels);
    const std::string file = ds.name() + ".dsd";
    save_dataset(ds, dir / file, FileFormat::dsd);
    entry["file"] = file;
    if (ds.has_labels()) {
      std::map<Label, std::size_t> hist;
      for (Label l : *ds.labels()) ++hist[l];
      Json h = Json::object();
      for (const auto& [l, n] : hist) h[std::to_string(l)] = n;
      entry["label_histogram"] = std::move(h);
    }
    areas.push_back(std::move(entry));
  }
  const auto los = std::count(scene.los.begin(), scene.los.end(), true);
  Json manifest{{"config", to_json(scene.config)},
                {"preprocess", to_string(preprocess)},
                {"labels", to_string(labels)},
                {"users", scene.users()},
                {"los_users", los},
                {"areas", std::move(areas)}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace dsetdist
