#include "panolayout/predict_stub.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

#include "panolayout/errors.hpp"

namespace panolayout {

static constexpr double kPi = 3.14159265358979323846;

namespace {

std::mt19937_64 sub_rng(uint64_t seed, uint64_t stream) {
  return std::mt19937_64(seed * 0x9E3779B97F4A7C15ull + stream + 1);
}

double uni(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

double trunc_gauss(std::mt19937_64& g, double sigma) {
  if (sigma <= 0.0) return 0.0;
  const double v = std::normal_distribution<double>(0.0, sigma)(g);
  return std::clamp(v, -5.0 * sigma, 5.0 * sigma);
}

void clip01(Image& img) {
  for (float& v : img.data) v = std::clamp(v, 0.f, 1.f);
}

void add_noise(Image& img, std::mt19937_64& g, double sigma) {
  if (sigma <= 0.0) return;
  for (float& v : img.data) v = static_cast<float>(v + trunc_gauss(g, sigma));
}

struct GridPoly {
  std::vector<Eigen::Vector2i> v;  // CCW, integer grid corners
};

int edge_len(const GridPoly& p, size_t i) {
  const auto d = p.v[(i + 1) % p.v.size()] - p.v[i];
  return std::abs(d.x()) + std::abs(d.y());
}

// Cuts a rectangular notch at a convex corner; adds exactly two vertices.
bool bite_corner(GridPoly& poly, size_t vi, std::mt19937_64& g) {
  const size_t n = poly.v.size();
  const Eigen::Vector2i V = poly.v[vi];
  const Eigen::Vector2i P = poly.v[(vi + n - 1) % n];
  const Eigen::Vector2i N = poly.v[(vi + 1) % n];
  Eigen::Vector2i din = V - P, dout = N - V;
  const int len_in = std::abs(din.x()) + std::abs(din.y());
  const int len_out = std::abs(dout.x()) + std::abs(dout.y());
  if (len_in < 2 || len_out < 2) return false;
  din /= len_in;
  dout /= len_out;
  if (din.x() * dout.y() - din.y() * dout.x() <= 0) return false;  // concave
  const int b_in = static_cast<int>(uni(g, 1.0, len_in - 1e-9));
  const int b_out = static_cast<int>(uni(g, 1.0, len_out - 1e-9));
  const Eigen::Vector2i v1 = V - din * b_in;
  const Eigen::Vector2i v2 = V + dout * b_out;
  const Eigen::Vector2i vm = v1 + dout * b_out;
  std::vector<Eigen::Vector2i> out;
  out.reserve(n + 2);
  for (size_t i = 0; i < n; ++i) {
    if (i == vi) {
      out.push_back(v1);
      out.push_back(vm);
      out.push_back(v2);
    } else {
      out.push_back(poly.v[i]);
    }
  }
  poly.v = std::move(out);
  return true;
}

double dist_point_seg(const Vector2d& p, const Vector2d& a, const Vector2d& b) {
  const Vector2d d = b - a;
  const double l2 = d.squaredNorm();
  double t = l2 > 0 ? (p - a).dot(d) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * d - p).norm();
}

}  // namespace

ManhattanLayout sample_layout(uint64_t seed, int n_corners,
                              const SampleParams& params) {
  if (n_corners < 4 || n_corners % 2 != 0 || n_corners > 22)
    throw std::invalid_argument("n_corners must be even, in [4, 22]");
  std::mt19937_64 g = sub_rng(seed, 0);
  const int bites = (n_corners - 4) / 2;

  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    const int nx = 4 + static_cast<int>(uni(g, 0.0, 4.0 - 1e-9));
    const int nz = 4 + static_cast<int>(uni(g, 0.0, 4.0 - 1e-9));
    GridPoly poly;
    poly.v = {{0, 0}, {nx, 0}, {nx, nz}, {0, nz}};
    bool ok = true;
    for (int b = 0; b < bites && ok; ++b) {
      ok = false;
      for (int t = 0; t < 8 && !ok; ++t) {
        const size_t vi =
            static_cast<size_t>(uni(g, 0.0, poly.v.size() - 1e-9));
        ok = bite_corner(poly, vi, g);
      }
    }
    if (!ok) continue;

    // Jitter shared grid lines off-grid, then scale to meters.
    std::map<int, double> jx, jz;
    for (const auto& v : poly.v) {
      jx.emplace(v.x(), 0.0);
      jz.emplace(v.y(), 0.0);
    }
    for (auto& [k, val] : jx) val = k + uni(g, -0.2, 0.2);
    for (auto& [k, val] : jz) val = k + uni(g, -0.2, 0.2);
    const double sx = uni(g, params.min_size, params.max_size) / nx;
    const double sz = uni(g, params.min_size, params.max_size) / nz;

    ManhattanLayout layout;
    for (const auto& v : poly.v)
      layout.plan.push_back({jx[v.x()] * sx, jz[v.y()] * sz});

    // Camera placement with wall clearance.
    Vector2d cam;
    bool placed = false;
    for (int t = 0; t < 50 && !placed; ++t) {
      cam = {uni(g, 0.0, nx * sx), uni(g, 0.0, nz * sz)};
      if (!point_in_plan(layout.plan, cam)) continue;
      double d = 1e9;
      for (size_t i = 0; i < layout.plan.size(); ++i)
        d = std::min(d, dist_point_seg(cam, layout.plan[i],
                                       layout.plan[(i + 1) %
                                                   layout.plan.size()]));
      placed = d >= params.wall_margin;
    }
    if (!placed) continue;
    for (Vector2d& p : layout.plan) p -= cam;

    // Star-shaped from the camera: every edge sweeps azimuth one way.
    bool star = true;
    for (size_t i = 0; i < layout.plan.size() && star; ++i) {
      const Vector2d& a = layout.plan[i];
      const Vector2d& b = layout.plan[(i + 1) % layout.plan.size()];
      star = a.x() * b.y() - a.y() * b.x() > 1e-6;
    }
    if (!star) continue;

    bool gaps_ok = true;
    for (size_t i = 0; i < layout.plan.size() && gaps_ok; ++i) {
      const Vector2d& a = layout.plan[i];
      const Vector2d& b = layout.plan[(i + 1) % layout.plan.size()];
      double d = std::abs(std::atan2(a.x(), a.y()) - std::atan2(b.x(), b.y()));
      if (d > kPi) d = 2 * kPi - d;
      gaps_ok = d >= params.min_azimuth_gap;
    }
    if (!gaps_ok) continue;

    layout.cam_to_floor =
        uni(g, params.cam_to_floor_min, params.cam_to_floor_max);
    const double h = uni(g, params.height_min, params.height_max);
    layout.cam_to_ceiling = h - layout.cam_to_floor;
    if (layout.cam_to_ceiling < 0.8) continue;

    double span = 0.0;
    for (const Vector2d& p : layout.plan)
      span = std::max({span, std::abs(p.x()), std::abs(p.y())});
    if (span > params.ceiling_span_ratio * layout.cam_to_ceiling) continue;

    if (!layout_is_valid(layout)) continue;
    return layout;
  }
  throw SamplingExhausted("no admissible room within the attempt budget");
}

EquirectMaps synth_equirect_maps(const ManhattanLayout& layout, int width,
                                 int height, const NoiseSpec& noise) {
  EquirectMaps out;
  const double j = noise.peak_jitter;

  // Boundary channels, each curve displaced rigidly by its own jitter draw.
  std::mt19937_64 gb = sub_rng(noise.rng_seed, 1);
  std::array<std::vector<Vector2d>, 3> seeds;
  const CornerSet2D corners = project_corners(layout, width, height);
  for (const CornerPair& p : corners.pairs) {
    const double du = j > 0 ? uni(gb, -j, j) : 0.0;
    const double v0 = p.ceil_uv.y(), v1 = p.floor_uv.y();
    const int steps = std::max(2, static_cast<int>(std::ceil((v1 - v0) * 2)));
    for (int s = 0; s <= steps; ++s)
      seeds[0].push_back({p.ceil_uv.x() + du, v0 + (v1 - v0) * s / steps});
  }
  std::vector<Vector2d> curve;
  for (size_t w = 0; w < layout.plan.size(); ++w) {
    for (int plane = 0; plane < 2; ++plane) {
      const double dv = j > 0 ? uni(gb, -j, j) : 0.0;
      sample_wall_curve(layout, static_cast<int>(w), plane == 0, width, height,
                        0.5, curve);
      for (const Vector2d& p : curve)
        seeds[plane == 0 ? 1 : 2].push_back({p.x(), p.y() + dv});
    }
  }
  Image be(width, height, 3, 0.f);
  for (int c = 0; c < 3; ++c) {
    const Image prof = point_profile_map(seeds[c], width, height, 20.0);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) be.at(x, y, c) = prof.at(x, y, 0);
  }

  // Corner peaks: jittered per end, dropped per pair.
  std::mt19937_64 gc = sub_rng(noise.rng_seed, 2);
  CornerSet2D noisy;
  for (const CornerPair& p : corners.pairs) {
    CornerPair q = p;
    if (j > 0) {
      q.ceil_uv += Vector2d(uni(gc, -j, j), uni(gc, -j, j));
      q.floor_uv += Vector2d(uni(gc, -j, j), uni(gc, -j, j));
    }
    const bool keep =
        noise.dropout_prob <= 0.0 || uni(gc, 0.0, 1.0) >= noise.dropout_prob;
    if (keep) noisy.pairs.push_back(q);
  }
  Image cm = render_corner_map(noisy, width, height, true);

  if (noise.blur_sigma > 0) {
    be = gaussian_blur(be, noise.blur_sigma);
    cm = gaussian_blur(cm, noise.blur_sigma);
  }
  std::mt19937_64 ga = sub_rng(noise.rng_seed, 3);
  add_noise(be, ga, noise.additive_sigma);
  add_noise(cm, ga, noise.additive_sigma);
  clip01(be);
  clip01(cm);
  out.boundaries = std::move(be);
  out.corners = std::move(cm);
  return out;
}

CeilingMaps synth_ceiling_maps(const ManhattanLayout& layout, int width,
                               int height, const PerspectiveConfig& view,
                               const NoiseSpec& noise) {
  CeilingMaps out;
  const Image sem = render_semantics(layout, width, height);
  Image fc(width, height, 1, 0.f);
  for (size_t i = 0; i < sem.data.size(); ++i)
    fc.data[i] = sem.data[i] == static_cast<float>(kWall) ? 0.f : 1.f;
  Image fp = render_floor_plan(layout, view).map;

  if (noise.blur_sigma > 0) {
    fc = gaussian_blur(fc, noise.blur_sigma);
    fp = gaussian_blur(fp, noise.blur_sigma);
  }
  std::mt19937_64 ga = sub_rng(noise.rng_seed, 4);
  add_noise(fc, ga, noise.additive_sigma);
  add_noise(fp, ga, noise.additive_sigma);
  clip01(fc);
  clip01(fp);
  out.fc = std::move(fc);
  out.fp = std::move(fp);
  return out;
}

void layout_boundary_rows(const ManhattanLayout& layout, int width, int height,
                          std::vector<double>& ceiling_v,
                          std::vector<double>& floor_v) {
  ceiling_v.resize(width);
  floor_v.resize(width);
  for (int u = 0; u < width; ++u) {
    const double theta = kPi * px_from_u(u, width);
    const double r = raycast_plan(layout.plan, theta);
    const double phi_c = std::atan2(layout.cam_to_ceiling, r);
    const double phi_f = -std::atan2(layout.cam_to_floor, r);
    ceiling_v[u] = v_from_py(phi_c / (0.5 * kPi), height);
    floor_v[u] = v_from_py(phi_f / (0.5 * kPi), height);
  }
}

std::vector<double> visible_corner_columns(const ManhattanLayout& layout,
                                           int width) {
  std::vector<double> cols;
  for (const Vector2d& c : layout.plan) {
    const double theta = std::atan2(c.x(), c.y());
    if (raycast_plan(layout.plan, theta) >= c.norm() - 1e-6)
      cols.push_back(u_from_px(theta / kPi, width));
  }
  std::sort(cols.begin(), cols.end());
  return cols;
}

ColumnPrediction synth_columns(const ManhattanLayout& layout, int width,
                               int height, const NoiseSpec& noise) {
  ColumnPrediction out;
  out.width = width;
  layout_boundary_rows(layout, width, height, out.ceiling_v, out.floor_v);

  std::mt19937_64 g = sub_rng(noise.rng_seed, 5);
  const double j = noise.peak_jitter;
  if (j > 0) {
    for (int u = 0; u < width; ++u) {
      out.ceiling_v[u] =
          std::clamp(out.ceiling_v[u] + uni(g, -j, j), 0.0, height - 1.0);
      out.floor_v[u] =
          std::clamp(out.floor_v[u] + uni(g, -j, j), 0.0, height - 1.0);
    }
  }

  constexpr double kBumpSigma = 8.0;
  out.corner_prob.assign(width, 0.0);
  std::mt19937_64 gc = sub_rng(noise.rng_seed, 6);
  for (double col : visible_corner_columns(layout, width)) {
    if (noise.dropout_prob > 0 && uni(gc, 0.0, 1.0) < noise.dropout_prob)
      continue;
    const double c = j > 0 ? col + uni(gc, -j, j) : col;
    const int r = static_cast<int>(std::ceil(4 * kBumpSigma));
    const int c0 = static_cast<int>(std::floor(c));
    for (int u = c0 - r; u <= c0 + r + 1; ++u) {
      const double d = u - c;
      int uu = u % width;
      if (uu < 0) uu += width;
      out.corner_prob[uu] =
          std::max(out.corner_prob[uu],
                   std::exp(-0.5 * d * d / (kBumpSigma * kBumpSigma)));
    }
  }

  if (noise.blur_sigma > 0) {
    // circular 1-D blur
    const int r = static_cast<int>(std::ceil(3 * noise.blur_sigma));
    std::vector<double> k(2 * r + 1);
    double sum = 0;
    for (int t = -r; t <= r; ++t)
      sum += k[t + r] =
          std::exp(-0.5 * t * t / (noise.blur_sigma * noise.blur_sigma));
    for (double& v : k) v /= sum;
    std::vector<double> blurred(width, 0.0);
    for (int u = 0; u < width; ++u)
      for (int t = -r; t <= r; ++t)
        blurred[u] += out.corner_prob[((u + t) % width + width) % width] *
                      k[t + r];
    out.corner_prob = std::move(blurred);
  }
  std::mt19937_64 ga = sub_rng(noise.rng_seed, 7);
  if (noise.additive_sigma > 0)
    for (double& v : out.corner_prob) v += trunc_gauss(ga, noise.additive_sigma);
  for (double& v : out.corner_prob) v = std::clamp(v, 0.0, 1.0);
  return out;
}

CornerSet2D drop_corner(const CornerSet2D& corners, size_t index) {
  CornerSet2D out = corners;
  out.pairs.erase(out.pairs.begin() + index);
  return out;
}

std::optional<size_t> find_concave_corner(const ManhattanLayout& layout) {
  const size_t n = layout.plan.size();
  for (size_t i = 0; i < n; ++i) {
    const Vector2d din = layout.plan[i] - layout.plan[(i + n - 1) % n];
    const Vector2d dout = layout.plan[(i + 1) % n] - layout.plan[i];
    if (din.x() * dout.y() - din.y() * dout.x() < 0) return i;
  }
  return std::nullopt;
}

}  // namespace panolayout
