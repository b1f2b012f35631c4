#pragma once

#include <vector>

#include "panolayout/geometry.hpp"

namespace panolayout {

// Manhattan room model. plan is a simple rectilinear polygon in meters,
// vertices counter-clockwise (positive signed area in (x, z)), edges strictly
// alternating between x-parallel and z-parallel, camera at the origin and
// strictly inside. Floor at y = -cam_to_floor, ceiling at y = +cam_to_ceiling.
struct ManhattanLayout {
  std::vector<Vector2d> plan;
  double cam_to_floor = 1.6;
  double cam_to_ceiling = 1.6;

  double height() const { return cam_to_floor + cam_to_ceiling; }
};

// Throws InfeasibleLayout if any invariant fails.
void validate_layout(const ManhattanLayout& layout);
bool layout_is_valid(const ManhattanLayout& layout);

double plan_area(const std::vector<Vector2d>& plan);
bool point_in_plan(const std::vector<Vector2d>& plan, const Vector2d& p);

// Distance to the first wall hit by the plan ray at azimuth theta
// (theta = atan2(x, z)). Also reports which edge was hit.
double raycast_plan(const std::vector<Vector2d>& plan, double theta,
                    int* wall = nullptr);

// Projected image positions of one plan corner's ceiling and floor ends.
// Both share a column; ceil_uv.y() < floor_uv.y().
struct CornerPair {
  Vector2d ceil_uv;
  Vector2d floor_uv;
};
struct CornerSet2D {
  std::vector<CornerPair> pairs;  // plan-vertex order
};

CornerSet2D project_corners(const ManhattanLayout& layout, int width,
                            int height);

// Unit-peak Gaussian profile of a subpixel point set: every pixel reads
// exp(-d^2 / (2 sigma^2)) of its distance to the nearest point, x snapped to
// the nearest column (<= 0.5 px), y kept exact. x wraps; an empty set gives
// an all-zero map. Response is exactly 1 on the points, so the map's ridge
// sits on the drawn curve with no corner-blob displacement.
Image point_profile_map(const std::vector<Vector2d>& pts, int width,
                        int height, double sigma);

// Equirect boundary map, 3 channels: 0 wall-wall, 1 ceiling-wall,
// 2 wall-floor. Edges are drawn whether visible or occluded. With smooth set,
// each channel becomes the sigma-20 unit-peak profile of its curve.
Image render_boundary_map(const ManhattanLayout& layout, int width, int height,
                          bool smooth = true);

// Single-channel corner map with a peak at every projected corner end.
Image render_corner_map(const ManhattanLayout& layout, int width, int height,
                        bool smooth = true);
Image render_corner_map(const CornerSet2D& corners, int width, int height,
                        bool smooth = true);

// Binary room-interior mask rasterized in the ceiling view at the ceiling
// plane. clipped flags plan vertices that fall outside the view canvas.
struct FloorPlanRender {
  Image map;
  bool clipped = false;
};
FloorPlanRender render_floor_plan(const ManhattanLayout& layout,
                                  const PerspectiveConfig& cfg = {});

// Per-pixel class of the first surface hit: 0 ceiling, 1 wall, 2 floor.
enum SemanticClass { kCeiling = 0, kWall = 1, kFloor = 2 };
Image render_semantics(const ManhattanLayout& layout, int width, int height);

struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> depth;    // Euclidean ray length, meters
  std::vector<uint8_t> valid;  // 1 = usable
};
DepthMap render_depth(const ManhattanLayout& layout, int width, int height);

// Uniform rescale so cam_to_floor matches the target camera height.
ManhattanLayout rescale_to_camera_height(const ManhattanLayout& layout,
                                         double cam_to_floor = 1.6);

// Samples the projected image curve of wall i's ceiling or floor edge with
// consecutive points no farther than max_step_px apart (seam-aware).
void sample_wall_curve(const ManhattanLayout& layout, int wall, bool ceiling,
                       int width, int height, double max_step_px,
                       std::vector<Vector2d>& out_uv);

}  // namespace panolayout
