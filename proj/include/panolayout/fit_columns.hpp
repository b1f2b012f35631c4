#pragma once

#include "panolayout/layout.hpp"
#include "panolayout/predict_stub.hpp"

namespace panolayout {

struct ColumnFitParams {
  double corner_threshold = 0.5;  // corner_prob local maxima above this
  int corner_min_sep = 20;        // px between accepted peaks (circular)
  double inlier_dist = 0.16;      // meters, line-vote window
  double merge_dist = 0.10;       // parallel walls closer than this merge
  double cam_to_floor = 1.6;      // scale gauge of the recovered layout
};

// Circular local maxima at least min_dist apart, tallest first wins,
// values below threshold ignored. Returns ascending indices.
std::vector<int> find_peaks_circular(const std::vector<double>& signal,
                                     int min_dist, double threshold);

// 3-point parabolic sub-sample refinement around index i.
double refine_peak(const std::vector<double>& signal, int i, bool circular);

// Room height from per-column boundary rows with the camera 1.6 m above the
// floor: H = 1.6 + mean implied ceiling height.
double estimate_height(const ColumnPrediction& cols, double cam_to_floor = 1.6);

// One plan point per boundary sample; ceiling rows lifted to the ceiling
// plane (H - cam_to_floor up), floor rows to the floor plane, merged with
// equal weight. Points are emitted per column, azimuth order.
struct BoundaryCloud {
  std::vector<Vector2d> pts;
  std::vector<int> col;  // source column of each point
};
BoundaryCloud project_boundary_points(const ColumnPrediction& cols, double H,
                                      double cam_to_floor = 1.6);

// One wall per point group: first PCA component, offset voted by the count
// of points within inlier_dist, then snapped to the nearer Manhattan axis.
// axis 0 = runs along x (z fixed), axis 1 = runs along z (x fixed).
struct WallSeg {
  int axis = 0;
  double offset = 0.0;
  Vector2d gap_a;  // first group point, for bridging
  Vector2d gap_b;  // last group point
  int inliers = 0;
};
std::vector<WallSeg> fit_walls(const std::vector<std::vector<Vector2d>>& groups,
                               const ColumnFitParams& params);

// Azimuth-ordered wall chain -> validated layout. Consecutive same-axis
// walls merge when their offsets nearly agree, otherwise a perpendicular
// connecting wall is inserted at the boundary-point gap. Throws
// InfeasibleLayout on contradictions.
ManhattanLayout hallucinate_occluded(std::vector<WallSeg> walls,
                                     double cam_to_floor,
                                     double cam_to_ceiling,
                                     double merge_dist = 0.10);

// Shared helper: azimuth-ordered corner estimates -> validated layout.
// Diagonal gaps (a hidden corner between two detected ones) are resolved by
// axis alternation. cam heights are carried through.
ManhattanLayout layout_from_azimuth_corners(const std::vector<Vector2d>& pts,
                                            double cam_to_floor,
                                            double cam_to_ceiling,
                                            double merge_dist = 0.10);

ManhattanLayout fit_columns(const ColumnPrediction& cols,
                            const ColumnFitParams& params = {});

}  // namespace panolayout
