#pragma once

#include <cstdint>
#include <optional>

#include "panolayout/layout.hpp"

namespace panolayout {

// Corruption model standing in for network prediction error. All randomness
// flows from rng_seed; the same spec reproduces the same maps bit for bit.
// additive noise is a Gaussian truncated at +-5 sigma (maps are clipped to
// [0,1] afterwards); positional jitter is uniform in [-j, +j] so bound checks
// hold exactly; dropout removes whole corner peaks.
struct NoiseSpec {
  double blur_sigma = 0.0;
  double additive_sigma = 0.0;
  double peak_jitter = 0.0;
  double dropout_prob = 0.0;
  uint64_t rng_seed = 0;
};

struct SampleParams {
  double min_size = 3.0;   // room extent range per axis, meters
  double max_size = 8.0;
  double wall_margin = 0.35;       // camera clearance from every wall
  double min_azimuth_gap = 0.30;   // radians between consecutive corners
  double cam_to_floor_min = 1.2;
  double cam_to_floor_max = 1.8;
  double height_min = 2.6;
  double height_max = 3.4;
  // Cap on per-corner max(|x|,|z|) over cam_to_ceiling. tan(80 deg) = 5.67,
  // so 5.35 keeps every wall inside a 160-degree ceiling view with margin;
  // rooms too wide for the sampled ceiling height are rejected.
  double ceiling_span_ratio = 5.35;
  // 12-corner rooms pass the azimuth-gap screen only ~1e-5 of the time, so
  // the budget is sized for them; typical draws stop after a few attempts.
  int max_attempts = 2000000;
};

// Rejection-samples a rectilinear room with exactly n_corners corners,
// camera re-centered to a uniformly sampled interior point. Guarantees the
// full invariant set plus camera-star-shapedness and the azimuth gap, so
// every corner is visible and resolvable. Throws SamplingExhausted.
ManhattanLayout sample_layout(uint64_t seed, int n_corners,
                              const SampleParams& params = {});

struct EquirectMaps {
  Image boundaries;  // 3-channel edge map
  Image corners;     // 1-channel corner map
};
EquirectMaps synth_equirect_maps(const ManhattanLayout& layout, int width,
                                 int height, const NoiseSpec& noise);

struct CeilingMaps {
  Image fc;  // equirect ceiling+floor probability, 1 channel
  Image fp;  // ceiling-view plan probability, 1 channel
};
CeilingMaps synth_ceiling_maps(const ManhattanLayout& layout, int width,
                               int height, const PerspectiveConfig& view,
                               const NoiseSpec& noise);

struct ColumnPrediction {
  int width = 0;  // matching pano width; image height is width / 2
  std::vector<double> ceiling_v;
  std::vector<double> floor_v;
  std::vector<double> corner_prob;
};
ColumnPrediction synth_columns(const ManhattanLayout& layout, int width,
                               int height, const NoiseSpec& noise);

// Exact per-column boundary rows of the first-hit wall; shared by the stub
// and by tests.
void layout_boundary_rows(const ManhattanLayout& layout, int width, int height,
                          std::vector<double>& ceiling_v,
                          std::vector<double>& floor_v);

// Columns (real-valued) of corners visible from the camera, azimuth order.
std::vector<double> visible_corner_columns(const ManhattanLayout& layout,
                                           int width);

// Removes one corner's peaks from a corner set (occlusion simulation).
CornerSet2D drop_corner(const CornerSet2D& corners, size_t index);

// Index of the first concave (reflex) corner, if any.
std::optional<size_t> find_concave_corner(const ManhattanLayout& layout);

}  // namespace panolayout
