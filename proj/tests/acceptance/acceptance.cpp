// Acceptance harness. `acceptance N` runs criterion N; no argument runs all.
// Prints one "criterion N: PASS|FAIL ..." line per criterion and exits
// nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dsetdist/bench.hpp"
#include "dsetdist/embedding.hpp"
#include "dsetdist/geometric.hpp"
#include "dsetdist/pipeline.hpp"
#include "dsetdist/report.hpp"
#include "dsetdist/statistical.hpp"
#include "dsetdist/subspace.hpp"
#include "dsetdist/supervised.hpp"
#include "dsetdist/synthgen.hpp"
#include "oracles.hpp"

using namespace dsetdist;
namespace fs = std::filesystem;

namespace {

/// Counts checks and keeps the first few violations for the report line.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++violations_;
    if (notes_.size() < 5) notes_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    const double err = std::abs(got - want);
    worst_ = std::max(worst_, err);
    if (err <= tol) {
      ++checks_;
      return;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: got %.17g want %.17g (err %.3g > %.3g)", what.c_str(), got, want, err, tol);
    expect(false, buf);
  }
  bool ok() const { return violations_ == 0; }
  std::size_t checks() const { return checks_; }
  std::size_t violations() const { return violations_; }
  double worst() const { return worst_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::size_t checks_ = 0;
  std::size_t violations_ = 0;
  double worst_ = 0.0;
  std::vector<std::string> notes_;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome summarize(const Checker& c, double seconds, double limit, const std::string& extra = {}) {
  std::ostringstream os;
  os << c.checks() << " checks, " << c.violations() << " violations, worst abs err " << fmt("%.3g", c.worst())
     << ", " << fmt("%.1f", seconds) << " s";
  if (limit > 0) os << " (limit " << fmt("%.0f", limit) << " s)";
  if (!extra.empty()) os << "; " << extra;
  for (const auto& n : c.notes()) os << "\n    " << n;
  return {c.ok() && (limit <= 0 || seconds < limit), os.str()};
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string pair_tag(int t, const char* what) { return "pair " + std::to_string(t) + " " + what; }

Dataset random_dataset(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  const double scale = 0.5 + 2.0 * rng.uniform();
  Matrix x = oracle::random_matrix(rng, rows, cols, scale);
  for (Eigen::Index j = 0; j < cols; ++j) x.col(j).array() += rng.uniform(-2.0, 2.0);
  return Dataset(std::move(x));
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dsetdist_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// 1. Metric values against independent brute-force oracles.
Outcome metric_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;
  Rng rng(101);
  for (int t = 0; t < 100; ++t) {
    const auto ma = static_cast<Eigen::Index>(2 + rng.index(29));
    const auto mb = static_cast<Eigen::Index>(2 + rng.index(29));
    const auto n = static_cast<Eigen::Index>(1 + rng.index(5));
    const Dataset a = random_dataset(rng, ma, n);
    const Dataset b = random_dataset(rng, mb, n);
    const auto w = wasserstein1(a, b);
    const auto ks = kolmogorov_smirnov(a, b);
    for (Eigen::Index f = 0; f < n; ++f) {
      const auto ca = oracle::column(a, f);
      const auto cb = oracle::column(b, f);
      c.near(w.per_feature[static_cast<std::size_t>(f)], oracle::transport_w1(ca, cb), 1e-9, pair_tag(t, "wasserstein"));
      c.near(ks.per_feature[static_cast<std::size_t>(f)], oracle::ks_scan(ca, cb), 1e-12, pair_tag(t, "ks"));
    }
    c.near(pairwise_euclidean(a, b), oracle::mean_cross_distance(a.data(), b.data()), 1e-12, pair_tag(t, "pairwise"));
    c.near(centroid_euclidean(a, b), oracle::centroid_distance(a.data(), b.data()), 1e-12, pair_tag(t, "centroid"));
    // k = M: every point is its own cluster, so the value is the pairwise mean.
    const Eigen::Index k = std::min(ma, mb);
    const Dataset ak(a.data().topRows(k));
    const Dataset bk(b.data().topRows(k));
    c.near(cluster_euclidean(ak, bk, static_cast<int>(k), static_cast<std::uint64_t>(t)),
           oracle::mean_cross_distance(ak.data(), bk.data()), 1e-12, pair_tag(t, "cluster k=M"));
    c.near(energy_distance(a, b), oracle::energy(a.data(), b.data()), 1e-12, pair_tag(t, "energy"));
    c.near(mmd(a, b, MmdKernel::rbf), oracle::rbf_mmd2(a.data(), b.data()), 1e-12, pair_tag(t, "mmd_rbf"));
  }
  return summarize(c, elapsed(t0), 30.0);
}

// 2. Symmetry, non-negativity, identity and bounds over fuzzed pairs.
Outcome axioms() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;
  const std::map<std::string, double> swap_tol{{"cluster_euclidean", 1e-9}, {"grassmann", 1e-8},
                                               {"chordal", 1e-8},           {"asimov", 1e-8}};
  const std::vector<std::string> zero_on_self{"centroid_euclidean", "wasserstein", "ks",  "energy",
                                              "mmd_rbf",            "mmd_linear",  "tv",  "js",
                                              "hellinger"};
  Rng rng(202);
  for (int t = 0; t < 1000; ++t) {
    const auto ma = static_cast<Eigen::Index>(10 + rng.index(21));
    const auto mb = static_cast<Eigen::Index>(10 + rng.index(21));
    const auto n = static_cast<Eigen::Index>(1 + rng.index(5));
    const Dataset a = random_dataset(rng, ma, n);
    const Dataset b = random_dataset(rng, mb, n);
    MetricParams params;
    params.seed = static_cast<std::uint64_t>(t);
    for (const auto& name : metric_names()) {
      const BaseDistance d = make_distance(name, params);
      const double ab = d(a, b);
      const double ba = d(b, a);
      const std::string tag = pair_tag(t, name.c_str());
      c.expect(std::isfinite(ab) && ab >= 0.0, tag + " negative or non-finite: " + fmt("%.17g", ab));
      if (MetricSpec::parse(name).symmetric()) {
        const auto it = swap_tol.find(name);
        c.near(ab, ba, it == swap_tol.end() ? 1e-12 : it->second, tag + " swap");
      }
      if (name == "js") c.expect(ab <= std::numbers::ln2 + 1e-12, tag + " above ln2");
      if (name == "hellinger" || name == "tv") c.expect(ab <= 1.0 + 1e-12, tag + " above 1");
      if (name == "pad") c.expect(ab <= 2.0, tag + " above 2");
      if (name == "asimov") c.expect(ab <= std::numbers::pi / 2 + 1e-12, tag + " above pi/2");
    }
    for (const auto& name : zero_on_self) {
      c.near(make_distance(name, params)(a, a), 0.0, 1e-12, pair_tag(t, name.c_str()) + " self");
    }
    const auto pa = principal_angles(a, b, default_subspace_dim(n));
    for (double th : pa.angles) {
      c.expect(th >= 0.0 && th <= std::numbers::pi / 2 + 1e-12, pair_tag(t, "angle") + " out of [0, pi/2]");
    }
  }
  return summarize(c, elapsed(t0), 0.0);
}

// 3. Translation and rotation behavior.
Outcome translation_rotation() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;
  Rng rng(303);
  for (int t = 0; t < 50; ++t) {
    const auto ma = static_cast<Eigen::Index>(5 + rng.index(26));
    const auto mb = static_cast<Eigen::Index>(5 + rng.index(26));
    const auto n = static_cast<Eigen::Index>(2 + rng.index(5));
    const Dataset a = random_dataset(rng, ma, n);
    const Dataset b = random_dataset(rng, mb, n);

    Eigen::RowVectorXd shift(n);
    for (Eigen::Index j = 0; j < n; ++j) shift(j) = rng.uniform(-10.0, 10.0);
    const Dataset moved(a.data().rowwise() + shift);
    const auto w = wasserstein1(a, moved);
    for (Eigen::Index j = 0; j < n; ++j) {
      c.near(w.per_feature[static_cast<std::size_t>(j)], std::abs(shift(j)), 1e-9, pair_tag(t, "w1 shift"));
    }

    const Dataset at(a.data().rowwise() + shift);
    const Dataset bt(b.data().rowwise() + shift);
    c.near(pairwise_euclidean(at, bt), pairwise_euclidean(a, b), 1e-9, pair_tag(t, "pairwise translate"));
    c.near(centroid_euclidean(at, bt), centroid_euclidean(a, b), 1e-9, pair_tag(t, "centroid translate"));
    c.near(cluster_euclidean(at, bt, 3, 5), cluster_euclidean(a, b, 3, 5), 1e-9, pair_tag(t, "cluster translate"));

    const Eigen::MatrixXd r = oracle::random_rotation(rng, n);
    const Dataset ar(a.data() * r);
    const Dataset br(b.data() * r);
    const int k = std::min<int>(static_cast<int>(n), 3);
    const auto p0 = principal_angles(a, b, k);
    const auto p1 = principal_angles(ar, br, k);
    c.near(grassmann(p1), grassmann(p0), 1e-8, pair_tag(t, "grassmann rotate"));
    c.near(chordal(p1), chordal(p0), 1e-8, pair_tag(t, "chordal rotate"));
    c.near(asimov(p1), asimov(p0), 1e-8, pair_tag(t, "asimov rotate"));
  }
  return summarize(c, elapsed(t0), 0.0);
}

// 4. Label-aware distance and penalty table.
Outcome label_aware() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;
  Rng rng(404);
  for (int t = 0; t < 20; ++t) {
    std::vector<Dataset> ds;
    const int k = 2 + static_cast<int>(rng.index(3));
    for (int i = 0; i < k; ++i) {
      const auto m = static_cast<Eigen::Index>(3 + rng.index(20));
      Labels l(static_cast<std::size_t>(m));
      for (auto& v : l) v = static_cast<Label>(rng.index(5));
      ds.emplace_back(oracle::random_matrix(rng, m, 3, 1.0 + i), l);
    }
    const LabelPenaltyTable got = penalty_table(DatasetGroup(ds));
    const auto want = oracle::penalty_table(ds);
    c.expect(got.penalty.size() == want.size(), pair_tag(t, "penalty vocabulary"));
    for (const auto& [l, p] : want) c.near(got.at(l), p, 1e-12, pair_tag(t, "penalty"));
    c.near(label_aware_distance(ds[0], ds[0], got, centroid_euclidean), 0.0, 0.0, pair_tag(t, "identical"));
  }
  // L_a = {0}, L_b = {1}: only the penalty branch applies, giving (P_0 + P_1) / 4.
  Matrix xa(2, 1), xb(2, 1);
  xa << 0.0, 4.0;
  xb << 1.0, 7.0;
  const Dataset a(xa, Labels{0, 0});
  const Dataset b(xb, Labels{1, 1});
  const LabelPenaltyTable table = penalty_table(DatasetGroup({a, b}));
  c.near(table.at(0), 4.0, 0.0, "P_0");
  c.near(table.at(1), 6.0, 0.0, "P_1");
  c.near(label_aware_distance(a, b, table, centroid_euclidean), (table.at(0) + table.at(1)) / 4.0, 0.0,
         "disjoint labels");
  for (int t = 0; t < 20; ++t) {
    const Dataset ra(oracle::random_matrix(rng, 6, 3), Labels(6, 0));
    const Dataset rb(oracle::random_matrix(rng, 5, 3, 2.0), Labels(5, 1));
    const LabelPenaltyTable rt = penalty_table(DatasetGroup({ra, rb}));
    c.near(label_aware_distance(ra, rb, rt, pairwise_euclidean), (rt.at(0) + rt.at(1)) / 4.0, 1e-15,
           pair_tag(t, "disjoint random"));
  }
  return summarize(c, elapsed(t0), 0.0);
}

// 5. Graph embedding separates distant blobs, deterministically.
Outcome embedding_separation() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;
  Rng rng(505);
  Matrix xa = oracle::random_matrix(rng, 200, 10, 0.1);
  Matrix xb = oracle::random_matrix(rng, 200, 10, 0.1);
  xb.col(0).array() += 100.0;
  const DatasetGroup g({Dataset(xa, std::nullopt, "a"), Dataset(xb, std::nullopt, "b")});
  EmbeddingConfig config;
  config.seed = 5;
  const JointEmbedding e1 = fit_graph_embedding(g, config);
  const JointEmbedding e2 = fit_graph_embedding(g, config);
  const Matrix a = e1.coordinates.topRows(200);
  const Matrix b = e1.coordinates.bottomRows(200);
  const double gap = (a.colwise().mean() - b.colwise().mean()).norm();
  auto max_std = [](const Matrix& m) {
    const Matrix ctr = m.rowwise() - m.colwise().mean();
    return std::sqrt((ctr.array().square().colwise().sum() / static_cast<double>(m.rows())).maxCoeff());
  };
  const double spread = std::max(max_std(a), max_std(b));
  c.expect(gap > 5.0 * spread, "gap " + fmt("%.4g", gap) + " <= 5 x " + fmt("%.4g", spread));
  c.expect(e1.coordinates.size() == e2.coordinates.size() &&
               std::memcmp(e1.coordinates.data(), e2.coordinates.data(),
                           sizeof(double) * static_cast<std::size_t>(e1.coordinates.size())) == 0,
           "rerun not bit-identical");
  return summarize(c, elapsed(t0), 60.0, "gap/spread = " + fmt("%.1f", gap / spread));
}

// 6. Monotone family through the bench pipeline.
Outcome monotone_benchmark() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;
  const fs::path dir = scratch("monotone");
  // Shared anisotropic covariance; means step along a low-variance axis that
  // the rank-4 reconstruction basis does not cover.
  const std::vector<double> sd{3.0, 2.8, 2.6, 2.4, 2.0, 1.8, 1.0, 1.0};
  Json files = Json::array();
  for (int i = 0; i < 10; ++i) {
    Rng rng = Rng::stream(606, static_cast<std::uint64_t>(i));
    Matrix x(500, 8);
    for (Eigen::Index r = 0; r < 500; ++r) {
      for (Eigen::Index f = 0; f < 8; ++f) x(r, f) = sd[static_cast<std::size_t>(f)] * rng.normal();
    }
    x.col(7).array() += static_cast<double>(i);
    const std::string name = "mean" + std::to_string(i) + ".dsd";
    save_dataset(Dataset(x, std::nullopt, "mean" + std::to_string(i)), dir / name);
    files.push_back(name);
  }
  const Json cfg = {{"datasets", files},
                    {"task", {{"kind", "reconstruction"}, {"rank", 4}}},
                    {"metrics", {"raw/centroid_euclidean", "raw/constant"}},
                    {"seed", 6}};
  const RunConfig config = RunConfig::from_json(cfg, dir);
  const BenchResult result = run_bench(config);
  const Json report = report_json(config, result, false);
  c.expect(result.ok(), "bench reported errors: " + errors_json(result).dump());
  std::string extra;
  for (const auto& m : report["metrics"]) {
    const auto& p = m["pearson"];
    const std::string name = m["metric"];
    if (name == "raw/centroid_euclidean") {
      c.expect(!p["value"].is_null() && p["value"].get<double>() >= 0.9, "centroid pearson below 0.9: " + p.dump());
    } else {
      c.expect(p["value"].is_null() || p["value"].get<double>() <= 0.2, "constant pearson above 0.2: " + p.dump());
    }
    extra += name + " pearson " + (p["value"].is_null() ? p["note"].get<std::string>() : fmt("%.4f", p["value"])) + "; ";
  }
  return summarize(c, elapsed(t0), 120.0, extra);
}

// 7. Generated scene: label-aware centroid in a 2-D graph embedding vs raw JS.
Outcome scene_benchmark() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;
  const Json cfg = {{"scene", {{"preprocess", "angle_delay"}, {"labels", "beam"}}},
                    {"task", {{"kind", "beam_classification"}}},
                    {"embedding", {{"point_metric", "correlation"}}},
                    {"metrics", {"sumap2/label_aware:centroid_euclidean", "raw/js"}},
                    {"seed", 0}};
  const RunConfig config = RunConfig::from_json(cfg);
  const DatasetGroup group = load_run_datasets(config);
  std::size_t users = 0;
  for (const auto& d : group.datasets()) users += static_cast<std::size_t>(d.rows());
  const BenchResult result = run_bench(config, group);
  c.expect(result.ok(), "bench reported errors: " + errors_json(result).dump());
  c.expect(group.size() == 20, "expected 20 tiles, got " + std::to_string(group.size()));
  std::map<std::string, std::optional<double>> rho;
  for (const auto& m : result.metrics) rho[m.descriptor] = m.correlation.pearson.value;
  const auto la = rho["sumap2/label_aware:centroid_euclidean"];
  const auto js = rho["raw/js"];
  c.expect(la && js && *la > *js, "label-aware pearson not above raw JS");
  const std::string extra = std::to_string(group.size()) + " tiles, " + std::to_string(users) +
                            " users; sumap2/label_aware:centroid_euclidean pearson " +
                            (la ? fmt("%.4f", *la) : std::string("undefined")) + " vs raw/js " +
                            (js ? fmt("%.4f", *js) : std::string("undefined"));
  return summarize(c, elapsed(t0), 600.0, extra);
}

// 8. Binary format, report determinism, angle-delay width.
Outcome formats() {
  const auto t0 = std::chrono::steady_clock::now();
  Checker c;
  const fs::path dir = scratch("formats");
  Rng rng(808);
  for (int t = 0; t < 20; ++t) {
    const auto m = static_cast<Eigen::Index>(1 + rng.index(50));
    const auto n = static_cast<Eigen::Index>(1 + rng.index(20));
    Matrix x = oracle::random_matrix(rng, m, n, std::pow(10.0, rng.uniform(-300.0, 300.0)));
    x(0, 0) = -0.0;
    if (m * n > 1) x(m - 1, n - 1) = std::numeric_limits<double>::denorm_min();
    std::optional<Labels> labels;
    if (t % 2 == 0) {
      labels = Labels(static_cast<std::size_t>(m));
      for (auto& l : *labels) l = static_cast<Label>(rng.index(1000)) - 500;
    }
    const Dataset d(x, labels);
    const fs::path p = dir / ("rt" + std::to_string(t) + ".dsd");
    save_dataset(d, p);
    const Dataset back = load_dataset(p);
    c.expect(back.rows() == m && back.cols() == n &&
                 std::memcmp(back.data().data(), x.data(), sizeof(double) * static_cast<std::size_t>(m * n)) == 0,
             "DSD data not bit-exact in case " + std::to_string(t));
    c.expect(back.labels() == labels, "DSD labels differ in case " + std::to_string(t));
    std::ifstream in(p, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    c.expect(bytes == encode_dsd(back), "re-encoding differs in case " + std::to_string(t));
  }

  Json files = Json::array();
  for (int i = 0; i < 4; ++i) {
    Labels l(60);
    for (auto& v : l) v = static_cast<Label>(rng.index(4));
    Matrix x = oracle::random_matrix(rng, 60, 6);
    x.col(i).array() += 1.5;
    save_dataset(Dataset(x, l), dir / ("set" + std::to_string(i) + ".dsd"));
    files.push_back("set" + std::to_string(i) + ".dsd");
  }
  const Json cfg = {{"datasets", files},
                    {"task", {{"kind", "beam_classification"}}},
                    {"embedding", {{"n_neighbors", 15}, {"epochs", 50}}},
                    {"metrics", {"raw/js", "umap2/wasserstein", "sumap2/label_aware:centroid_euclidean",
                                 "raw/cluster_euclidean", "raw/pad", "pca3/grassmann"}},
                    {"seed", 8}};
  std::ofstream(dir / "run.json") << cfg.dump(2);
  auto run_once = [&](unsigned threads) {
    set_thread_count(threads);
    const RunConfig config = RunConfig::load(dir / "run.json");
    Json report = report_json(config, run_bench(config), true);
    c.expect(report.contains("generated_at"), "timestamp missing");
    report.erase("generated_at");
    return report.dump(2);
  };
  const std::string first = run_once(1);
  const std::string second = run_once(1);
  const std::string third = run_once(3);
  set_thread_count(0);
  c.expect(first == second, "bench rerun differs");
  c.expect(first == third, "bench output depends on thread count");

  const ChannelScene scene = generate_scene(SceneConfig{});
  const Dataset ad = channels_to_dataset(scene, 0, Preprocess::angle_delay);
  c.expect(ad.cols() == 1024, "angle-delay width " + std::to_string(ad.cols()));
  return summarize(c, elapsed(t0), 0.0, "angle-delay features " + std::to_string(ad.cols()));
}

}  // namespace

int main(int argc, char** argv) {
  set_log_level(LogLevel::quiet);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"metric oracles", metric_oracles},
      {"axioms", axioms},
      {"translation and rotation", translation_rotation},
      {"label-aware", label_aware},
      {"embedding separation", embedding_separation},
      {"monotone benchmark", monotone_benchmark},
      {"scene benchmark", scene_benchmark},
      {"formats", formats},
  };
  std::vector<int> which;
  if (argc > 1) {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], criteria.size());
      return 2;
    }
    which.push_back(n);
  } else {
    for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) which.push_back(n);
  }
  int failed = 0;
  for (int n : which) {
    const auto& [label, run] = criteria[static_cast<std::size_t>(n - 1)];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s %s: %s\n", n, o.pass ? "PASS" : "FAIL", label, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
