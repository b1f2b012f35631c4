#pragma once

#include "panolayout/layout.hpp"
#include "panolayout/predict_stub.hpp"

namespace panolayout {

struct CeilingFitParams {
  double threshold = 0.5;      // fused-map binarization
  double dp_epsilon = 3.0;     // boundary simplification tolerance, px
  double cluster_radius = 5.0; // 1-D merge radius for grid lines, px
  double coverage = 0.5;       // keep a grid cell above this mask ratio
  bool cuboid = false;         // bounding-rectangle mode
};

// Upper / lower hemisphere of the equirect ceiling+floor probability
// projected to the ceiling and floor views. The floor view is mirrored
// vertically and resampled about the image center with factor
// 1.6 / (H - 1.6) so both views project the same plan when the camera sits
// 1.6 m below the ceiling. Throws DegenerateHeight when H <= 1.6 + 1e-3.
void split_and_project_fc(const Image& fc, double H,
                          const PerspectiveConfig& cfg, Image* ceiling_view,
                          Image* floor_view);

// 0.5 * fp + 0.25 * ceiling_view + 0.25 * floor_view, elementwise.
Image fuse_floor_plan(const Image& fp, const Image& ceiling_view,
                      const Image& floor_view);

// Largest 4-connected component of the thresholded map and its bounding
// rectangle (inclusive pixel indices). Throws EmptyRegion.
struct Region {
  Image mask;  // 1 channel, 0 or 1, largest component only
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};
Region extract_region(const Image& fused, double threshold = 0.5);

// Moore boundary trace of the component, one vertex per boundary pixel,
// closed loop in pixel coordinates.
std::vector<Vector2d> trace_boundary(const Region& region);

// Closed-loop Douglas-Peucker, anchored at the two farthest-apart vertices.
std::vector<Vector2d> simplify_closed(const std::vector<Vector2d>& loop,
                                      double epsilon);

// Snaps the simplified loop to a Manhattan grid: edges vote for grid lines
// (1-D clustering, borders of the bounding rectangle absorb nearby lines),
// cells kept when their mask coverage exceeds params.coverage, holes are
// filled, and the cell-union boundary is returned as a rectilinear polygon
// in pixel coordinates. Throws NonRectilinear if diagonal edges dominate,
// the union is disconnected or pinched, or the camera pixel is excluded.
std::vector<Vector2d> regularize_manhattan(const std::vector<Vector2d>& poly,
                                           const Region& region,
                                           const PerspectiveConfig& cfg,
                                           const CeilingFitParams& params);

// Ceiling-view pixel polygon -> metric layout through the view projection at
// the 1.6 m camera-to-ceiling plane; cam_to_floor = H - 1.6.
ManhattanLayout extrude(const std::vector<Vector2d>& plan_px, double H,
                        const PerspectiveConfig& cfg);

ManhattanLayout fit_ceiling(const CeilingMaps& maps, double H,
                            const PerspectiveConfig& cfg = {},
                            const CeilingFitParams& params = {});

// Height in this fitter's cam_to_ceiling = 1.6 frame, derived from column
// boundary predictions: H = 1.6 * (1 + mean floor/ceiling distance ratio).
double ceiling_height_from_columns(const ColumnPrediction& cols);

}  // namespace panolayout
