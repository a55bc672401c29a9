#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "dsetdist/core.hpp"

namespace dsetdist {

using ComplexMatrix = Eigen::MatrixXcd;

/// Axis-aligned rectangle in meters; blocks line of sight and excludes users.
struct Rect {
  double x0, y0, x1, y1;
  bool contains(double x, double y) const noexcept;
  /// True when the segment p -> q passes through the rectangle.
  bool intersects_segment(double px, double py, double qx, double qy) const noexcept;
};

struct SceneConfig {
  int n_bs_antennas = 32;   // half-wavelength ULA along x, broadside towards +y
  int n_subcarriers = 32;
  int grid_width = 100;     // meters; users sit at cell centers on a 1 m grid
  int grid_height = 60;
  std::array<double, 2> bs_position{50.0, -20.0};
  int n_paths = 5;
  int n_scatterers = 24;
  std::vector<Rect> blockers{{20, 15, 30, 25}, {60, 10, 72, 22}, {40, 35, 55, 45},
                             {80, 40, 90, 52}, {8, 42, 16, 55}};
  double carrier_ghz = 3.5;
  double bandwidth_mhz = 20.0;
  /// The receive window opens this many samples before the first arrival.
  int timing_guard_taps = 2;
  std::uint64_t seed = 0;
  int tile_rows = 4;
  int tile_cols = 5;

  int n_tiles() const noexcept { return tile_rows * tile_cols; }
  void validate() const;
};

struct ChannelScene {
  SceneConfig config;
  std::vector<ComplexMatrix> channels;          // N_BS x N_sub per user
  std::vector<std::array<double, 2>> positions;
  std::vector<bool> los;
  Labels beams;
  std::vector<int> areas;

  std::size_t users() const noexcept { return channels.size(); }
};

ChannelScene generate_scene(const SceneConfig& config);

/// Received power of every DFT codebook beam, summed over subcarriers.
std::vector<double> beam_powers(const ComplexMatrix& h);

/// argmax of beam_powers; ties go to the lowest index.
Label best_beam(const ComplexMatrix& h);
Labels beam_labels(const ChannelScene& scene);

/// Unitary 2-D DFT: angle across antennas, delay across subcarriers, untrimmed.
ComplexMatrix angle_delay(const ComplexMatrix& h);

enum class Preprocess { raw, angle_delay };
enum class SceneLabel { none, los, beam };

Preprocess parse_preprocess(const std::string& s);
SceneLabel parse_scene_label(const std::string& s);
std::string to_string(Preprocess p);
std::string to_string(SceneLabel l);

/// Features for one area. angle_delay keeps the first N_sub / 2 delay taps.
Dataset channels_to_dataset(const ChannelScene& scene, int area, Preprocess preprocess,
                            SceneLabel label = SceneLabel::none);

}  // namespace dsetdist
