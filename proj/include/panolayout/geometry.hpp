#pragma once

#include <Eigen/Dense>

#include "panolayout/image.hpp"

namespace panolayout {

using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

// World frame: x right, y up, z forward. Equirect panoramas have width = 2 *
// height. Normalized image coords p in [-1,1]^2:
//   p.x = atan2(s.x, s.z) / pi      (azimuth, seam at +-1)
//   p.y = asin(s.y) / (pi/2)        (elevation, zenith at +1)
// Pixel centers: p.x = 2*(u+0.5)/W - 1, p.y = 1 - 2*(v+0.5)/H. Row 0 is the
// top of the image (near the zenith).

inline double px_from_u(double u, int w) { return 2.0 * (u + 0.5) / w - 1.0; }
inline double u_from_px(double px, int w) { return (px + 1.0) * 0.5 * w - 0.5; }
inline double py_from_v(double v, int h) { return 1.0 - 2.0 * (v + 0.5) / h; }
inline double v_from_py(double py, int h) { return (1.0 - py) * 0.5 * h - 0.5; }

// At the poles (s.x = s.z = 0) the azimuth is pinned to 0.
Vector2d sphere_to_equirect(const Vector3d& s);
Vector3d equirect_to_sphere(const Vector2d& p);

struct PerspectiveConfig {
  double fov_deg = 160.0;
  int size = 512;
};

// Pinhole focal length in pixels: 0.5 * size * cot(fov/2).
double focal_px(const PerspectiveConfig& cfg);

// Perspective views looking straight up (ceiling) or straight down (floor),
// obtained by rotating the pixel ray (p_x, p_y, f) about the x axis.
// Ceiling view: world +x -> +p_x, world +z -> -p_y (bottom of the view).
// Floor view:   world +x -> +p_x, world +z -> +p_y (top of the view).
// pix = (col, row) in real pixel coordinates.
Vector3d view_ray(const PerspectiveConfig& cfg, bool ceiling,
                  const Vector2d& pix);

// Equirect normalized coords sampled by a perspective pixel.
Vector2d p2e_lookup(const PerspectiveConfig& cfg, bool ceiling,
                    const Vector2d& pix);

// Resample an equirect panorama into the ceiling or floor view.
Image e2p_project(const Image& pano, const PerspectiveConfig& cfg,
                  bool ceiling);

// Plan <-> ceiling-view pixels for a horizontal plane h meters above the
// camera. Plan coords are (x, z) in meters.
Vector2d plan_to_view_px(const PerspectiveConfig& cfg, const Vector2d& xz,
                         double h);
Vector2d view_px_to_plan(const PerspectiveConfig& cfg, const Vector2d& pix,
                         double h);

// out(s) = in(R^T s): scene content at direction d moves to direction R d.
// Sample coordinates landing within 1e-6 of a pixel center are snapped, so
// yaws by whole columns are exact copies.
Image rotate_panorama(const Image& pano, const Matrix3d& R);

// General perspective render: cam_to_world maps camera rays (x right, y up,
// z forward optical axis) into world directions.
Image render_view(const Image& pano, const Matrix3d& cam_to_world,
                  double fov_deg, int size);

Matrix3d rot_x(double rad);
Matrix3d rot_y(double rad);

}  // namespace panolayout
