#include "panolayout/geometry.hpp"

#include <cmath>

namespace panolayout {

static constexpr double kPi = 3.14159265358979323846;

Vector2d sphere_to_equirect(const Vector3d& s) {
  double px = 0.0;
  if (std::abs(s.x()) > 0.0 || std::abs(s.z()) > 0.0)
    px = std::atan2(s.x(), s.z()) / kPi;
  const double sy = std::clamp(s.y(), -1.0, 1.0);
  return {px, std::asin(sy) / (0.5 * kPi)};
}

Vector3d equirect_to_sphere(const Vector2d& p) {
  const double theta = kPi * p.x();
  const double phi = 0.5 * kPi * p.y();
  const double c = std::cos(phi);
  return {c * std::sin(theta), std::sin(phi), c * std::cos(theta)};
}

double focal_px(const PerspectiveConfig& cfg) {
  const double half = 0.5 * cfg.fov_deg * kPi / 180.0;
  return 0.5 * cfg.size * std::cos(half) / std::sin(half);
}

Vector3d view_ray(const PerspectiveConfig& cfg, bool ceiling,
                  const Vector2d& pix) {
  const double f = focal_px(cfg);
  const double px = pix.x() + 0.5 - 0.5 * cfg.size;
  const double py = 0.5 * cfg.size - (pix.y() + 0.5);
  // Rx(-90) for the ceiling: (x, y, z) -> (x, z, -y); Rx(+90) for the floor.
  if (ceiling) return {px, f, -py};
  return {px, -f, py};
}

Vector2d p2e_lookup(const PerspectiveConfig& cfg, bool ceiling,
                    const Vector2d& pix) {
  return sphere_to_equirect(view_ray(cfg, ceiling, pix).normalized());
}

Image e2p_project(const Image& pano, const PerspectiveConfig& cfg,
                  bool ceiling) {
  Image out(cfg.size, cfg.size, pano.channels, 0.f);
  for (int j = 0; j < cfg.size; ++j)
    for (int i = 0; i < cfg.size; ++i) {
      const Vector2d p = p2e_lookup(cfg, ceiling, {double(i), double(j)});
      const double u = u_from_px(p.x(), pano.width);
      const double v = v_from_py(p.y(), pano.height);
      for (int c = 0; c < pano.channels; ++c)
        out.at(i, j, c) = sample_wrap(pano, u, v, c);
    }
  return out;
}

Vector2d plan_to_view_px(const PerspectiveConfig& cfg, const Vector2d& xz,
                         double h) {
  const double f = focal_px(cfg);
  const double px = f * xz.x() / h;
  const double py = -f * xz.y() / h;
  return {px + 0.5 * cfg.size - 0.5, 0.5 * cfg.size - 0.5 - py};
}

Vector2d view_px_to_plan(const PerspectiveConfig& cfg, const Vector2d& pix,
                         double h) {
  const double f = focal_px(cfg);
  const double px = pix.x() + 0.5 - 0.5 * cfg.size;
  const double py = 0.5 * cfg.size - (pix.y() + 0.5);
  return {px * h / f, -py * h / f};
}

Image rotate_panorama(const Image& pano, const Matrix3d& R) {
  const Matrix3d Rt = R.transpose();
  Image out(pano.width, pano.height, pano.channels, 0.f);
  for (int v = 0; v < pano.height; ++v)
    for (int u = 0; u < pano.width; ++u) {
      const Vector3d s = equirect_to_sphere(
          {px_from_u(u, pano.width), py_from_v(v, pano.height)});
      const Vector2d p = sphere_to_equirect(Rt * s);
      double su = u_from_px(p.x(), pano.width);
      double sv = v_from_py(p.y(), pano.height);
      if (std::abs(su - std::round(su)) < 1e-6) su = std::round(su);
      if (std::abs(sv - std::round(sv)) < 1e-6) sv = std::round(sv);
      for (int c = 0; c < pano.channels; ++c)
        out.at(u, v, c) = sample_wrap(pano, su, sv, c);
    }
  return out;
}

Image render_view(const Image& pano, const Matrix3d& cam_to_world,
                  double fov_deg, int size) {
  PerspectiveConfig cfg{fov_deg, size};
  const double f = focal_px(cfg);
  Image out(size, size, pano.channels, 0.f);
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) {
      const Vector3d cam(i + 0.5 - 0.5 * size, 0.5 * size - (j + 0.5), f);
      const Vector2d p = sphere_to_equirect((cam_to_world * cam).normalized());
      for (int c = 0; c < pano.channels; ++c)
        out.at(i, j, c) = sample_wrap(pano, u_from_px(p.x(), pano.width),
                                      v_from_py(p.y(), pano.height), c);
    }
  return out;
}

Matrix3d rot_x(double rad) {
  Matrix3d m;
  const double c = std::cos(rad), s = std::sin(rad);
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}

Matrix3d rot_y(double rad) {
  Matrix3d m;
  const double c = std::cos(rad), s = std::sin(rad);
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}

}  // namespace panolayout
