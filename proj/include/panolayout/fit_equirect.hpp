#pragma once

#include "panolayout/fit_columns.hpp"
#include "panolayout/predict_stub.hpp"

namespace panolayout {

struct ScoreWeights {
  double w_junc = 1.0;
  double w_ceil = 1.0;
  double w_floor = 1.0;
};

struct EquirectFitParams {
  double step_px = 2.0;          // initial ascent step, image pixels
  int max_iters = 200;
  double eps = 1e-6;             // stop once the step shrinks below this, m
  double fd_h_px = 0.5;          // central-difference displacement, pixels
  double peak_threshold = 0.35;  // fraction of max column response
  int peak_min_sep = 20;         // px between corner columns
  uint64_t rng_seed = 7;
};

// Corner-column peaks of the summed-over-rows corner map (median-subtracted,
// local maxima >= peak_threshold * max, min_sep apart), then the largest row
// peak above and below the horizon per column. Sub-pixel via parabolas.
// Throws TooFewCorners when fewer than 4 columns qualify.
CornerSet2D extract_corner_candidates(const Image& corner_map,
                                      const EquirectFitParams& params = {});

// Lifts corner pairs to plan points at unit camera-to-floor distance,
// cam_to_ceiling = mean per-corner estimate, walls snapped to Manhattan axes
// with hidden corners completed. Throws InfeasibleInit when snapping fails.
ManhattanLayout init_layout(const CornerSet2D& corners, int width, int height);

// w_junc * mean corner-map response at projected corner ends
// + w_ceil / w_floor * mean boundary-map response along the projected
// ceiling / floor polylines (1 px arc steps, bilinear, per-wall means
// averaged). Wall-wall boundary responses are not scored.
double score_layout(const ManhattanLayout& layout, const Image& corner_map,
                    const Image& boundary_map, const ScoreWeights& w = {});

// Free parameters of the ascent: one fixed coordinate per wall, then
// cam_to_ceiling. layout_from_params rebuilds corners by intersecting
// consecutive walls, keeping ref's wall axes and cam_to_floor.
std::vector<double> layout_params(const ManhattanLayout& layout);
ManhattanLayout layout_from_params(const ManhattanLayout& ref,
                                   const std::vector<double>& params);

// Central-difference gradient of score_layout in parameter space, all
// coordinates, displacement h in meters.
std::vector<double> score_gradient(const ManhattanLayout& layout,
                                   const Image& corner_map,
                                   const Image& boundary_map,
                                   const ScoreWeights& w, double h);

struct RefineInfo {
  std::vector<double> best_scores;  // best-so-far after each iteration
  int accepted = 0;
};

// Stochastic coordinate-subset hill climb: each iteration measures a
// central-difference gradient over ceil(dim/2) random coordinates, steps
// along the normalized gradient, accepts only score improvements on valid
// layouts, halves the step on rejection and restores it on acceptance.
// Returns the best-scoring iterate; never worse than L0.
ManhattanLayout refine_layout(const ManhattanLayout& L0,
                              const Image& corner_map,
                              const Image& boundary_map,
                              const ScoreWeights& w = {},
                              const EquirectFitParams& params = {},
                              RefineInfo* info = nullptr);

ManhattanLayout fit_equirect(const EquirectMaps& maps,
                             const ScoreWeights& w = {},
                             const EquirectFitParams& params = {});

}  // namespace panolayout
