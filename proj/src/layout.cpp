#include "panolayout/layout.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "panolayout/errors.hpp"

namespace panolayout {

static constexpr double kPi = 3.14159265358979323846;
static constexpr double kAxisTol = 1e-7;

namespace {

// 0 if the edge runs along x (z fixed), 1 if along z (x fixed), -1 otherwise.
int edge_axis(const Vector2d& a, const Vector2d& b) {
  const double dx = std::abs(b.x() - a.x());
  const double dz = std::abs(b.y() - a.y());
  if (dz <= kAxisTol && dx > kAxisTol) return 0;
  if (dx <= kAxisTol && dz > kAxisTol) return 1;
  return -1;
}

bool segments_intersect_axis_aligned(const Vector2d& a0, const Vector2d& a1,
                                     const Vector2d& b0, const Vector2d& b1) {
  const double ax0 = std::min(a0.x(), a1.x()), ax1 = std::max(a0.x(), a1.x());
  const double az0 = std::min(a0.y(), a1.y()), az1 = std::max(a0.y(), a1.y());
  const double bx0 = std::min(b0.x(), b1.x()), bx1 = std::max(b0.x(), b1.x());
  const double bz0 = std::min(b0.y(), b1.y()), bz1 = std::max(b0.y(), b1.y());
  return ax0 <= bx1 && bx0 <= ax1 && az0 <= bz1 && bz0 <= az1;
}

double dist_to_edge(const Vector2d& p, const Vector2d& a, const Vector2d& b) {
  const Vector2d d = b - a;
  const double len2 = d.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * d - p).norm();
}

}  // namespace

double plan_area(const std::vector<Vector2d>& plan) {
  double s = 0.0;
  for (size_t i = 0; i < plan.size(); ++i) {
    const Vector2d& a = plan[i];
    const Vector2d& b = plan[(i + 1) % plan.size()];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * s;
}

bool point_in_plan(const std::vector<Vector2d>& plan, const Vector2d& p) {
  bool inside = false;
  const size_t n = plan.size();
  for (size_t i = 0; i < n; ++i) {
    const Vector2d& a = plan[i];
    const Vector2d& b = plan[(i + 1) % n];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x =
          a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

void validate_layout(const ManhattanLayout& layout) {
  const auto& plan = layout.plan;
  const size_t n = plan.size();
  if (n < 4 || n % 2 != 0)
    throw InfeasibleLayout("plan needs an even corner count >= 4");
  if (!(layout.cam_to_floor > 0.0) || !(layout.cam_to_ceiling > 0.0))
    throw InfeasibleLayout("camera must sit between floor and ceiling");

  int prev_axis = -1;
  for (size_t i = 0; i < n; ++i) {
    const int axis = edge_axis(plan[i], plan[(i + 1) % n]);
    if (axis < 0) throw InfeasibleLayout("edge is not axis-parallel");
    if (i > 0 && axis == prev_axis)
      throw InfeasibleLayout("consecutive edges share an axis");
    prev_axis = axis;
  }
  if (edge_axis(plan[n - 1], plan[0]) == edge_axis(plan[0], plan[1]))
    throw InfeasibleLayout("consecutive edges share an axis");

  if (plan_area(plan) <= 0.0)
    throw InfeasibleLayout("plan must wind counter-clockwise");

  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect_axis_aligned(plan[i], plan[(i + 1) % n], plan[j],
                                          plan[(j + 1) % n]))
        throw InfeasibleLayout("plan self-intersects");
    }

  if (!point_in_plan(plan, {0.0, 0.0}))
    throw InfeasibleLayout("camera outside the plan");
  for (size_t i = 0; i < n; ++i)
    if (dist_to_edge({0.0, 0.0}, plan[i], plan[(i + 1) % n]) < 1e-9)
      throw InfeasibleLayout("camera on a wall");
}

bool layout_is_valid(const ManhattanLayout& layout) {
  try {
    validate_layout(layout);
    return true;
  } catch (const InfeasibleLayout&) {
    return false;
  }
}

double raycast_plan(const std::vector<Vector2d>& plan, double theta,
                    int* wall) {
  const double dx = std::sin(theta), dz = std::cos(theta);
  double best = std::numeric_limits<double>::infinity();
  int best_wall = -1;
  const size_t n = plan.size();
  for (size_t i = 0; i < n; ++i) {
    const Vector2d& a = plan[i];
    const Vector2d& b = plan[(i + 1) % n];
    double t = -1.0, lo, hi, hit;
    if (std::abs(b.x() - a.x()) <= kAxisTol) {  // x fixed
      if (std::abs(dx) < 1e-12) continue;
      t = a.x() / dx;
      hit = t * dz;
      lo = std::min(a.y(), b.y());
      hi = std::max(a.y(), b.y());
    } else {  // z fixed
      if (std::abs(dz) < 1e-12) continue;
      t = a.y() / dz;
      hit = t * dx;
      lo = std::min(a.x(), b.x());
      hi = std::max(a.x(), b.x());
    }
    if (t <= 1e-12) continue;
    if (hit < lo - 1e-9 || hit > hi + 1e-9) continue;
    if (t < best) {
      best = t;
      best_wall = static_cast<int>(i);
    }
  }
  if (wall) *wall = best_wall;
  return best;
}

CornerSet2D project_corners(const ManhattanLayout& layout, int width,
                            int height) {
  CornerSet2D out;
  out.pairs.reserve(layout.plan.size());
  for (const Vector2d& c : layout.plan) {
    const double r = c.norm();
    const double theta = std::atan2(c.x(), c.y());
    const double u = u_from_px(theta / kPi, width);
    const double phi_c = std::atan2(layout.cam_to_ceiling, r);
    const double phi_f = -std::atan2(layout.cam_to_floor, r);
    out.pairs.push_back({{u, v_from_py(phi_c / (0.5 * kPi), height)},
                         {u, v_from_py(phi_f / (0.5 * kPi), height)}});
  }
  return out;
}

namespace {

void set_px(Image& img, double u, double v, int c) {
  int x = static_cast<int>(std::lround(u));
  int y = static_cast<int>(std::lround(v));
  x %= img.width;
  if (x < 0) x += img.width;
  if (y < 0 || y >= img.height) return;
  img.at(x, y, c) = 1.f;
}

Vector2d project_plan_point(const Vector2d& xz, double h, int width,
                            int height) {
  const double r = xz.norm();
  const double theta = std::atan2(xz.x(), xz.y());
  const double phi = std::atan2(h, r);
  return {u_from_px(theta / kPi, width),
          v_from_py(phi / (0.5 * kPi), height)};
}

double wrapped_du(double u0, double u1, int width) {
  double d = std::abs(u0 - u1);
  return std::min(d, width - d);
}

void subdivide_curve(const Vector2d& a, const Vector2d& b, double ta,
                     double tb, const Vector2d& pa, const Vector2d& pb,
                     double h, int width, int height, double max_step,
                     int depth, std::vector<Vector2d>& out) {
  const double du = wrapped_du(pa.x(), pb.x(), width);
  const double dv = std::abs(pa.y() - pb.y());
  if (depth >= 16 || std::hypot(du, dv) <= max_step) {
    out.push_back(pb);
    return;
  }
  const double tm = 0.5 * (ta + tb);
  const Vector2d m = a + tm * (b - a);
  const Vector2d pm = project_plan_point(m, h, width, height);
  subdivide_curve(a, b, ta, tm, pa, pm, h, width, height, max_step, depth + 1,
                  out);
  subdivide_curve(a, b, tm, tb, pm, pb, h, width, height, max_step, depth + 1,
                  out);
}

}  // namespace

void sample_wall_curve(const ManhattanLayout& layout, int wall, bool ceiling,
                       int width, int height, double max_step_px,
                       std::vector<Vector2d>& out_uv) {
  const Vector2d a = layout.plan[wall];
  const Vector2d b = layout.plan[(wall + 1) % layout.plan.size()];
  const double h = ceiling ? layout.cam_to_ceiling : -layout.cam_to_floor;
  const Vector2d pa = project_plan_point(a, h, width, height);
  const Vector2d pb = project_plan_point(b, h, width, height);
  out_uv.clear();
  out_uv.push_back(pa);
  subdivide_curve(a, b, 0.0, 1.0, pa, pb, h, width, height, max_step_px, 0,
                  out_uv);
}

Image point_profile_map(const std::vector<Vector2d>& pts, int width,
                        int height, double sigma) {
  Image out(width, height, 1, 0.f);
  if (pts.empty()) return out;
  const int pad =
      std::min(width, static_cast<int>(std::ceil(5.0 * sigma)) + 2);
  const int wp = width + 2 * pad;
  const double kBig = 4.0 * double(width + height) * double(width + height);

  std::vector<std::vector<double>> col_ys(width);
  for (const Vector2d& p : pts) {
    int c = static_cast<int>(std::lround(p.x())) % width;
    if (c < 0) c += width;
    col_ys[c].push_back(p.y());
  }
  for (auto& ys : col_ys) std::sort(ys.begin(), ys.end());

  // dcol[c*height + y] = squared distance to the nearest seed of column c,
  // exact in y.
  std::vector<double> dcol(static_cast<size_t>(width) * height, kBig);
  for (int c = 0; c < width; ++c) {
    const std::vector<double>& ys = col_ys[c];
    if (ys.empty()) continue;
    size_t j = 0;
    for (int y = 0; y < height; ++y) {
      while (j + 1 < ys.size() &&
             std::abs(ys[j + 1] - y) <= std::abs(ys[j] - y))
        ++j;
      const double dy = y - ys[j];
      dcol[static_cast<size_t>(c) * height + y] = dy * dy;
    }
  }

  // Row pass: lower envelope of parabolas over the x-padded column costs
  // (Felzenszwalb-Huttenlocher), padding standing in for the x wrap.
  std::vector<double> f(wp), z(wp + 1);
  std::vector<int> v(wp);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int y = 0; y < height; ++y) {
    for (int cp = 0; cp < wp; ++cp) {
      const int c = ((cp - pad) % width + width) % width;
      f[cp] = dcol[static_cast<size_t>(c) * height + y];
    }
    int k = 0;
    v[0] = 0;
    z[0] = -kBig;
    z[1] = kBig;
    for (int q = 1; q < wp; ++q) {
      double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                 (2.0 * (q - v[k]));
      while (s <= z[k]) {
        --k;
        s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
            (2.0 * (q - v[k]));
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kBig;
    }
    int j = 0;
    for (int x = 0; x < width; ++x) {
      const int q = x + pad;
      while (z[j + 1] < q) ++j;
      const double dx = double(q - v[j]);
      out.at(x, y, 0) = static_cast<float>(std::exp(-(dx * dx + f[v[j]]) * inv));
    }
  }
  return out;
}

namespace {

constexpr double kSmoothSigma = 20.0;

void boundary_seed_sets(const ManhattanLayout& layout, int width, int height,
                        std::array<std::vector<Vector2d>, 3>& seeds) {
  const CornerSet2D corners = project_corners(layout, width, height);
  for (const CornerPair& p : corners.pairs) {
    const double v0 = p.ceil_uv.y(), v1 = p.floor_uv.y();
    const int steps = std::max(2, static_cast<int>(std::ceil((v1 - v0) * 2)));
    for (int s = 0; s <= steps; ++s)
      seeds[0].push_back({p.ceil_uv.x(), v0 + (v1 - v0) * s / steps});
  }
  std::vector<Vector2d> curve;
  for (size_t w = 0; w < layout.plan.size(); ++w) {
    for (int plane = 0; plane < 2; ++plane) {
      sample_wall_curve(layout, static_cast<int>(w), plane == 0, width, height,
                        0.5, curve);
      auto& dst = seeds[plane == 0 ? 1 : 2];
      dst.insert(dst.end(), curve.begin(), curve.end());
    }
  }
}

}  // namespace

Image render_boundary_map(const ManhattanLayout& layout, int width, int height,
                          bool smooth) {
  std::array<std::vector<Vector2d>, 3> seeds;
  boundary_seed_sets(layout, width, height, seeds);
  Image map(width, height, 3, 0.f);
  if (smooth) {
    for (int c = 0; c < 3; ++c) {
      const Image prof = point_profile_map(seeds[c], width, height,
                                           kSmoothSigma);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) map.at(x, y, c) = prof.at(x, y, 0);
    }
  } else {
    for (int c = 0; c < 3; ++c)
      for (const Vector2d& p : seeds[c]) set_px(map, p.x(), p.y(), c);
  }
  return map;
}

Image render_corner_map(const CornerSet2D& corners, int width, int height,
                        bool smooth) {
  Image map(width, height, 1, 0.f);
  if (!smooth) {
    for (const CornerPair& p : corners.pairs) {
      set_px(map, p.ceil_uv.x(), p.ceil_uv.y(), 0);
      set_px(map, p.floor_uv.x(), p.floor_uv.y(), 0);
    }
    return map;
  }
  // Few peaks: exact windowed evaluation, max-composited so overlapping
  // bumps keep their own unit maxima in place.
  const int r = static_cast<int>(std::ceil(5.0 * kSmoothSigma));
  const double inv = 1.0 / (2.0 * kSmoothSigma * kSmoothSigma);
  for (const CornerPair& p : corners.pairs) {
    for (int e = 0; e < 2; ++e) {
      const Vector2d& q = e ? p.floor_uv : p.ceil_uv;
      const int x0 = static_cast<int>(std::floor(q.x()));
      const int y0 = static_cast<int>(std::floor(q.y()));
      const int ylo = std::max(0, y0 - r), yhi = std::min(height - 1, y0 + r + 1);
      for (int y = ylo; y <= yhi; ++y) {
        for (int x = x0 - r; x <= x0 + r + 1; ++x) {
          const double dx = x - q.x(), dy = y - q.y();
          const float val =
              static_cast<float>(std::exp(-(dx * dx + dy * dy) * inv));
          int xx = x % width;
          if (xx < 0) xx += width;
          float& px = map.at(xx, y, 0);
          px = std::max(px, val);
        }
      }
    }
  }
  return map;
}

Image render_corner_map(const ManhattanLayout& layout, int width, int height,
                        bool smooth) {
  return render_corner_map(project_corners(layout, width, height), width,
                           height, smooth);
}

FloorPlanRender render_floor_plan(const ManhattanLayout& layout,
                                  const PerspectiveConfig& cfg) {
  FloorPlanRender out;
  out.map = Image(cfg.size, cfg.size, 1, 0.f);
  const double f = focal_px(cfg);
  const double h = layout.cam_to_ceiling;
  const size_t n = layout.plan.size();

  for (const Vector2d& c : layout.plan) {
    const Vector2d px = plan_to_view_px(cfg, c, h);
    if (px.x() < -0.5 || px.x() > cfg.size - 0.5 || px.y() < -0.5 ||
        px.y() > cfg.size - 0.5)
      out.clipped = true;
  }

  // Scanline fill: row j corresponds to plan z = (j + 0.5 - size/2) * h / f;
  // only x-fixed edges cross a constant-z line.
  std::vector<double> xs;
  for (int j = 0; j < cfg.size; ++j) {
    const double z = (j + 0.5 - 0.5 * cfg.size) * h / f;
    xs.clear();
    for (size_t i = 0; i < n; ++i) {
      const Vector2d& a = layout.plan[i];
      const Vector2d& b = layout.plan[(i + 1) % n];
      if ((a.y() > z) != (b.y() > z)) xs.push_back(a.x());
    }
    std::sort(xs.begin(), xs.end());
    for (size_t k = 0; k + 1 < xs.size(); k += 2) {
      // pixel i center maps to x = (i + 0.5 - size/2) * h / f
      const double c0 = f * xs[k] / h + 0.5 * cfg.size - 0.5;
      const double c1 = f * xs[k + 1] / h + 0.5 * cfg.size - 0.5;
      int i0 = static_cast<int>(std::floor(c0)) + 1;
      int i1 = static_cast<int>(std::ceil(c1)) - 1;
      i0 = std::max(i0, 0);
      i1 = std::min(i1, cfg.size - 1);
      for (int i = i0; i <= i1; ++i) out.map.at(i, j) = 1.f;
    }
  }
  return out;
}

namespace {

// Shared column kernel: first wall hit, then per-row branch on elevation.
template <typename Fn>
void raycast_image(const ManhattanLayout& layout, int width, int height,
                   Fn&& per_pixel) {
  for (int u = 0; u < width; ++u) {
    const double theta = kPi * px_from_u(u, width);
    const double r = raycast_plan(layout.plan, theta);
    const double phi_c = std::atan2(layout.cam_to_ceiling, r);
    const double phi_f = -std::atan2(layout.cam_to_floor, r);
    for (int v = 0; v < height; ++v) {
      const double phi = 0.5 * kPi * py_from_v(v, height);
      per_pixel(u, v, r, phi, phi_c, phi_f);
    }
  }
}

}  // namespace

Image render_semantics(const ManhattanLayout& layout, int width, int height) {
  Image out(width, height, 1, 0.f);
  raycast_image(layout, width, height,
                [&](int u, int v, double, double phi, double phi_c,
                    double phi_f) {
                  float cls = kWall;
                  if (phi > phi_c) cls = kCeiling;
                  else if (phi < phi_f) cls = kFloor;
                  out.at(u, v) = cls;
                });
  return out;
}

DepthMap render_depth(const ManhattanLayout& layout, int width, int height) {
  DepthMap out;
  out.width = width;
  out.height = height;
  out.depth.resize(static_cast<size_t>(width) * height);
  out.valid.assign(out.depth.size(), 1);
  raycast_image(layout, width, height,
                [&](int u, int v, double r, double phi, double phi_c,
                    double phi_f) {
                  double d;
                  if (phi > phi_c)
                    d = layout.cam_to_ceiling / std::sin(phi);
                  else if (phi < phi_f)
                    d = layout.cam_to_floor / -std::sin(phi);
                  else
                    d = r / std::cos(phi);
                  out.depth[static_cast<size_t>(v) * width + u] =
                      static_cast<float>(d);
                });
  return out;
}

ManhattanLayout rescale_to_camera_height(const ManhattanLayout& layout,
                                         double cam_to_floor) {
  const double s = cam_to_floor / layout.cam_to_floor;
  ManhattanLayout out = layout;
  for (Vector2d& p : out.plan) p *= s;
  out.cam_to_floor = layout.cam_to_floor * s;
  out.cam_to_ceiling = layout.cam_to_ceiling * s;
  return out;
}

}  // namespace panolayout
