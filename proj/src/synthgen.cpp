#include "dsetdist/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dsetdist/util.hpp"

namespace dsetdist {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
using cd = std::complex<double>;

struct Scatterer {
  double x, y;
  double attenuation_db;  // below the line-of-sight gain
  double phase;
};

struct Path {
  double gain;
  double phase;
  double delay;
  double angle;
};

std::vector<Scatterer> place_scatterers(const SceneConfig& c) {
  Rng rng = Rng::stream(c.seed, 0xBADC0FFEE);
  std::vector<Scatterer> out;
  for (int i = 0; i < c.n_scatterers; ++i) {
    Scatterer s;
    s.x = rng.uniform(-0.2 * c.grid_width, 1.2 * c.grid_width);
    s.y = rng.uniform(0.0, 1.3 * c.grid_height);
    s.attenuation_db = rng.uniform(10.0, 20.0);
    s.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    out.push_back(s);
  }
  return out;
}

double departure_angle(const SceneConfig& c, double x, double y) {
  return std::atan2(x - c.bs_position[0], y - c.bs_position[1]);
}

ComplexMatrix synthesize(const SceneConfig& c, const std::vector<Path>& paths) {
  const double df = c.bandwidth_mhz * 1e6 / c.n_subcarriers;
  ComplexMatrix h = ComplexMatrix::Zero(c.n_bs_antennas, c.n_subcarriers);
  for (const auto& p : paths) {
    const cd alpha = std::polar(p.gain, p.phase);
    const double spatial = std::numbers::pi * std::sin(p.angle);
    for (int s = 0; s < c.n_subcarriers; ++s) {
      const cd freq = alpha * std::polar(1.0, -2.0 * std::numbers::pi * s * df * p.delay);
      for (int m = 0; m < c.n_bs_antennas; ++m) {
        h(m, s) += freq * std::polar(1.0, -spatial * m);
      }
    }
  }
  return h;
}

}  // namespace

bool Rect::contains(double x, double y) const noexcept {
  return x >= x0 && x <= x1 && y >= y0 && y <= y1;
}

bool Rect::intersects_segment(double px, double py, double qx, double qy) const noexcept {
  // Liang-Barsky clipping of the segment against the rectangle.
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = qx - px;
  const double dy = qy - py;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {px - x0, x1 - px, py - y0, y1 - py};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  return true;
}

void SceneConfig::validate() const {
  if (n_bs_antennas < 1 || n_subcarriers < 2 || grid_width < 1 || grid_height < 1 || n_paths < 1 ||
      tile_rows < 1 || tile_cols < 1) {
    throw ValidationError("scene counts must be positive (and at least 2 subcarriers)");
  }
  if (timing_guard_taps < 0 || timing_guard_taps >= n_subcarriers / 2) {
    throw ValidationError("timing_guard_taps must lie in [0, n_subcarriers / 2)");
  }
  if (n_paths > 1 && n_scatterers < n_paths - 1) {
    throw ValidationError("need at least n_paths - 1 scatterers");
  }
  if (tile_cols > grid_width || tile_rows > grid_height) {
    throw ValidationError("more tiles than grid cells along an axis");
  }
  if (!(bandwidth_mhz > 0.0) || !(carrier_ghz > 0.0)) {
    throw ValidationError("carrier and bandwidth must be positive");
  }
}

ChannelScene generate_scene(const SceneConfig& config) {
  config.validate();
  const auto scatterers = place_scatterers(config);
  const double bx = config.bs_position[0];
  const double by = config.bs_position[1];

  struct Candidate {
    double x, y;
  };
  std::vector<Candidate> users;
  for (int gy = 0; gy < config.grid_height; ++gy) {
    for (int gx = 0; gx < config.grid_width; ++gx) {
      const double x = gx + 0.5;
      const double y = gy + 0.5;
      const bool inside = std::any_of(config.blockers.begin(), config.blockers.end(),
                                      [&](const Rect& r) { return r.contains(x, y); });
      if (!inside) users.push_back({x, y});
    }
  }

  ChannelScene scene;
  scene.config = config;
  const std::size_t n = users.size();
  scene.channels.resize(n);
  scene.positions.resize(n);
  scene.los.resize(n);
  scene.beams.resize(n);
  scene.areas.resize(n);
  std::vector<char> los(n, 0);

  parallel_for(n, [&](std::size_t u) {
    const double x = users[u].x;
    const double y = users[u].y;
    Rng rng = Rng::stream(config.seed, u);
    const double dist = std::hypot(x - bx, y - by);
    const bool blocked = std::any_of(config.blockers.begin(), config.blockers.end(),
                                     [&](const Rect& r) { return r.intersects_segment(bx, by, x, y); });
    std::vector<Path> paths;
    if (!blocked) paths.push_back({1.0 / dist, 0.0, dist / kSpeedOfLight, departure_angle(config, x, y)});

    // Reflections via the scatterers with the shortest bounce paths.
    std::vector<std::pair<double, std::size_t>> bounce;
    for (std::size_t s = 0; s < scatterers.size(); ++s) {
      const auto& sc = scatterers[s];
      bounce.emplace_back(std::hypot(sc.x - bx, sc.y - by) + std::hypot(x - sc.x, y - sc.y), s);
    }
    std::sort(bounce.begin(), bounce.end());
    for (int p = 0; p < config.n_paths - 1; ++p) {
      const auto& [length, s] = bounce[static_cast<std::size_t>(p)];
      const auto& sc = scatterers[s];
      const double att = std::clamp(sc.attenuation_db + rng.uniform(-1.0, 1.0), 10.0, 20.0);
      paths.push_back({std::pow(10.0, -att / 20.0) / dist, sc.phase + rng.uniform(-0.1, 0.1),
                       length / kSpeedOfLight, departure_angle(config, sc.x, sc.y)});
    }
    // Receiver timing is locked to the first arrival, less the guard.
    double first = std::numeric_limits<double>::infinity();
    for (const auto& p : paths) first = std::min(first, p.delay);
    const double guard = config.timing_guard_taps / (config.bandwidth_mhz * 1e6);
    for (auto& p : paths) p.delay += guard - first;

    scene.channels[u] = synthesize(config, paths);
    scene.positions[u] = {x, y};
    los[u] = blocked ? 0 : 1;
    const int col = std::min(config.tile_cols - 1, static_cast<int>(x * config.tile_cols / config.grid_width));
    const int row = std::min(config.tile_rows - 1, static_cast<int>(y * config.tile_rows / config.grid_height));
    scene.areas[u] = row * config.tile_cols + col;
    scene.beams[u] = best_beam(scene.channels[u]);
  });
  for (std::size_t u = 0; u < n; ++u) scene.los[u] = los[u] != 0;
  return scene;
}

std::vector<double> beam_powers(const ComplexMatrix& h) {
  const auto n = h.rows();
  std::vector<double> power(static_cast<std::size_t>(n), 0.0);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index b = 0; b < n; ++b) {
    Eigen::VectorXcd f(n);
    for (Eigen::Index m = 0; m < n; ++m) {
      f(m) = norm * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m * b) / static_cast<double>(n));
    }
    // f^H H[:, s] for every subcarrier at once.
    const Eigen::RowVectorXcd g = f.adjoint() * h;
    power[static_cast<std::size_t>(b)] = g.squaredNorm();
  }
  return power;
}

Label best_beam(const ComplexMatrix& h) {
  const auto p = beam_powers(h);
  return static_cast<Label>(std::max_element(p.begin(), p.end()) - p.begin());
}

Labels beam_labels(const ChannelScene& scene) {
  Labels out(scene.users());
  for (std::size_t u = 0; u < scene.users(); ++u) out[u] = best_beam(scene.channels[u]);
  return out;
}

ComplexMatrix angle_delay(const ComplexMatrix& h) {
  const auto na = h.rows();
  const auto ns = h.cols();
  ComplexMatrix fa(na, na);
  for (Eigen::Index k = 0; k < na; ++k) {
    for (Eigen::Index m = 0; m < na; ++m) {
      fa(k, m) = std::polar(1.0 / std::sqrt(static_cast<double>(na)),
                            -2.0 * std::numbers::pi * static_cast<double>(k * m) / static_cast<double>(na));
    }
  }
  // Delay axis uses the inverse kernel so that a delay tau lands on tap tau * bandwidth.
  ComplexMatrix fd(ns, ns);
  for (Eigen::Index s = 0; s < ns; ++s) {
    for (Eigen::Index t = 0; t < ns; ++t) {
      fd(s, t) = std::polar(1.0 / std::sqrt(static_cast<double>(ns)),
                            2.0 * std::numbers::pi * static_cast<double>(s * t) / static_cast<double>(ns));
    }
  }
  return fa * h * fd;
}

Preprocess parse_preprocess(const std::string& s) {
  if (s == "raw") return Preprocess::raw;
  if (s == "angle_delay") return Preprocess::angle_delay;
  throw ValidationError("unknown preprocessing '" + s + "' (expected raw or angle_delay)");
}

SceneLabel parse_scene_label(const std::string& s) {
  if (s == "none") return SceneLabel::none;
  if (s == "los") return SceneLabel::los;
  if (s == "beam") return SceneLabel::beam;
  throw ValidationError("unknown label kind '" + s + "' (expected none, los or beam)");
}

std::string to_string(Preprocess p) { return p == Preprocess::raw ? "raw" : "angle_delay"; }

std::string to_string(SceneLabel l) {
  switch (l) {
    case SceneLabel::none: return "none";
    case SceneLabel::los: return "los";
    case SceneLabel::beam: return "beam";
  }
  return "none";
}

Dataset channels_to_dataset(const ChannelScene& scene, int area, Preprocess preprocess, SceneLabel label) {
  if (area < 0 || area >= scene.config.n_tiles()) {
    throw ValidationError("area " + std::to_string(area) + " outside [0, " +
                          std::to_string(scene.config.n_tiles()) + ")");
  }
  std::vector<std::size_t> members;
  for (std::size_t u = 0; u < scene.users(); ++u) {
    if (scene.areas[u] == area) members.push_back(u);
  }
  if (members.empty()) throw InsufficientDataError("area " + std::to_string(area) + " has no users");

  const auto na = scene.config.n_bs_antennas;
  const auto ns = preprocess == Preprocess::raw ? scene.config.n_subcarriers : scene.config.n_subcarriers / 2;
  const auto p = static_cast<Eigen::Index>(na) * ns;
  Matrix re(static_cast<Eigen::Index>(members.size()), p);
  Matrix im(static_cast<Eigen::Index>(members.size()), p);
  Labels labels;
  for (std::size_t r = 0; r < members.size(); ++r) {
    const std::size_t u = members[r];
    const ComplexMatrix h = preprocess == Preprocess::raw ? scene.channels[u]
                                                          : ComplexMatrix(angle_delay(scene.channels[u]).leftCols(ns));
    for (Eigen::Index m = 0; m < na; ++m) {
      for (Eigen::Index s = 0; s < ns; ++s) {
        re(static_cast<Eigen::Index>(r), m * ns + s) = h(m, s).real();
        im(static_cast<Eigen::Index>(r), m * ns + s) = h(m, s).imag();
      }
    }
    if (label == SceneLabel::los) labels.push_back(scene.los[u] ? 1 : 0);
    if (label == SceneLabel::beam) labels.push_back(scene.beams[u]);
  }
  Dataset ds = complex_to_real(re, im, "area_" + std::to_string(area));
  if (label != SceneLabel::none) ds = ds.with_labels(std::move(labels));
  return ds;
}

}  // namespace dsetdist
