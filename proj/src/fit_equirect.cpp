#include "panolayout/fit_equirect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "panolayout/errors.hpp"

namespace panolayout {

static constexpr double kPi = 3.14159265358979323846;

namespace {

// Largest row peak of column x restricted to [y0, y1), parabola-refined.
double best_row_peak(const Image& map, int x, int y0, int y1) {
  int best = y0;
  for (int y = y0; y < y1; ++y)
    if (map.at(x, y, 0) > map.at(x, best, 0)) best = y;
  if (best == 0 || best == map.height - 1) return best;
  const double a = map.at(x, best - 1, 0);
  const double b = map.at(x, best, 0);
  const double c = map.at(x, best + 1, 0);
  const double denom = a - 2 * b + c;
  if (std::abs(denom) < 1e-12) return best;
  return best + 0.5 * (a - c) / denom;
}

}  // namespace

CornerSet2D extract_corner_candidates(const Image& corner_map,
                                      const EquirectFitParams& params) {
  const int w = corner_map.width, h = corner_map.height;
  std::vector<double> resp(w, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) resp[x] += corner_map.at(x, y, 0);

  std::vector<double> sorted = resp;
  std::nth_element(sorted.begin(), sorted.begin() + w / 2, sorted.end());
  const double median = sorted[w / 2];
  double peak = 0.0;
  for (int x = 0; x < w; ++x) {
    resp[x] = std::max(0.0, resp[x] - median);
    peak = std::max(peak, resp[x]);
  }

  const std::vector<int> cols = find_peaks_circular(
      resp, params.peak_min_sep, params.peak_threshold * peak);
  if (cols.size() < 4) throw TooFewCorners("fewer than 4 corner columns");

  CornerSet2D out;
  for (int x : cols) {
    const double u = refine_peak(resp, x, true);
    CornerPair pair;
    pair.ceil_uv = Vector2d(u, best_row_peak(corner_map, x, 0, h / 2));
    pair.floor_uv = Vector2d(u, best_row_peak(corner_map, x, h / 2, h));
    out.pairs.push_back(pair);
  }
  return out;
}

ManhattanLayout init_layout(const CornerSet2D& corners, int width,
                            int height) {
  if (corners.pairs.size() < 4)
    throw TooFewCorners("fewer than 4 corner columns");
  std::vector<Vector2d> pts;
  double ceil_acc = 0.0;
  for (const CornerPair& p : corners.pairs) {
    const double theta = kPi * px_from_u(p.ceil_uv.x(), width);
    const double phi_f = 0.5 * kPi * py_from_v(p.floor_uv.y(), height);
    const double phi_c = 0.5 * kPi * py_from_v(p.ceil_uv.y(), height);
    if (phi_f > -1e-3 || phi_c < 1e-3)
      throw InfeasibleInit("corner pair does not straddle the horizon");
    const double r = 1.0 / std::tan(-phi_f);  // unit cam_to_floor gauge
    pts.emplace_back(r * std::sin(theta), r * std::cos(theta));
    ceil_acc += r * std::tan(phi_c);
  }
  const double cam_to_ceiling = ceil_acc / corners.pairs.size();
  try {
    // Merge radius matches the 1.6 m gauge scaled to the unit gauge.
    return layout_from_azimuth_corners(pts, 1.0, cam_to_ceiling, 0.10 / 1.6);
  } catch (const InfeasibleLayout& e) {
    throw InfeasibleInit(e.what());
  }
}

double score_layout(const ManhattanLayout& layout, const Image& corner_map,
                    const Image& boundary_map, const ScoreWeights& w) {
  const int width = boundary_map.width, height = boundary_map.height;
  const CornerSet2D corners = project_corners(layout, width, height);
  double junc = 0.0;
  for (const CornerPair& p : corners.pairs) {
    // Cubic here: the bilinear surface peaks at pixel centers, which drags
    // corners up to half a pixel off the true map peak during refinement.
    junc += sample_wrap_cubic(corner_map, p.ceil_uv.x(), p.ceil_uv.y(), 0);
    junc += sample_wrap_cubic(corner_map, p.floor_uv.x(), p.floor_uv.y(), 0);
  }
  junc /= 2.0 * corners.pairs.size();

  double edge[2] = {0.0, 0.0};
  std::vector<Vector2d> curve;
  std::vector<double> vals;
  const size_t n = layout.plan.size();
  for (int plane = 0; plane < 2; ++plane) {
    for (size_t i = 0; i < n; ++i) {
      sample_wall_curve(layout, static_cast<int>(i), plane == 0, width, height,
                        1.0, curve);
      vals.resize(curve.size());
      for (size_t j = 0; j < curve.size(); ++j)
        vals[j] = sample_wrap(boundary_map, curve[j].x(), curve[j].y(),
                              plane == 0 ? 1 : 2);
      // Trapezoidal mean over arc length; a per-sample mean would jump
      // whenever a parameter change re-discretizes the curve.
      double acc = 0.0, total = 0.0;
      for (size_t j = 0; j + 1 < curve.size(); ++j) {
        double du = curve[j + 1].x() - curve[j].x();
        du -= width * std::round(du / width);
        const double len = std::hypot(du, curve[j + 1].y() - curve[j].y());
        acc += 0.5 * (vals[j] + vals[j + 1]) * len;
        total += len;
      }
      edge[plane] += total > 1e-12
                         ? acc / total
                         : std::accumulate(vals.begin(), vals.end(), 0.0) /
                               vals.size();
    }
    edge[plane] /= n;
  }
  return w.w_junc * junc + w.w_ceil * edge[0] + w.w_floor * edge[1];
}

std::vector<double> layout_params(const ManhattanLayout& layout) {
  const size_t n = layout.plan.size();
  std::vector<double> p(n + 1);
  for (size_t i = 0; i < n; ++i) {
    const Vector2d& a = layout.plan[i];
    const Vector2d& b = layout.plan[(i + 1) % n];
    // x-parallel wall fixes z, z-parallel wall fixes x.
    p[i] = std::abs(b.x() - a.x()) > std::abs(b.y() - a.y()) ? a.y() : a.x();
  }
  p[n] = layout.cam_to_ceiling;
  return p;
}

ManhattanLayout layout_from_params(const ManhattanLayout& ref,
                                   const std::vector<double>& params) {
  const size_t n = ref.plan.size();
  ManhattanLayout out;
  out.cam_to_floor = ref.cam_to_floor;
  out.cam_to_ceiling = params[n];
  out.plan.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const size_t prev = (i + n - 1) % n;
    const Vector2d& a = ref.plan[i];
    const Vector2d& b = ref.plan[(i + 1) % n];
    const bool x_parallel = std::abs(b.x() - a.x()) > std::abs(b.y() - a.y());
    // Corner i joins wall prev and wall i; exactly one fixes each axis.
    if (x_parallel)
      out.plan[i] = Vector2d(params[prev], params[i]);
    else
      out.plan[i] = Vector2d(params[i], params[prev]);
  }
  return out;
}

std::vector<double> score_gradient(const ManhattanLayout& layout,
                                   const Image& corner_map,
                                   const Image& boundary_map,
                                   const ScoreWeights& w, double h) {
  const std::vector<double> p0 = layout_params(layout);
  std::vector<double> g(p0.size(), 0.0);
  for (size_t k = 0; k < p0.size(); ++k) {
    std::vector<double> p = p0;
    p[k] = p0[k] + h;
    const ManhattanLayout hi = layout_from_params(layout, p);
    p[k] = p0[k] - h;
    const ManhattanLayout lo = layout_from_params(layout, p);
    if (!layout_is_valid(hi) || !layout_is_valid(lo)) continue;
    g[k] = (score_layout(hi, corner_map, boundary_map, w) -
            score_layout(lo, corner_map, boundary_map, w)) /
           (2 * h);
  }
  return g;
}

ManhattanLayout refine_layout(const ManhattanLayout& L0,
                              const Image& corner_map,
                              const Image& boundary_map,
                              const ScoreWeights& w,
                              const EquirectFitParams& params,
                              RefineInfo* info) {
  const int width = boundary_map.width;
  double mean_r = 0.0;
  for (const Vector2d& c : L0.plan) mean_r += c.norm();
  mean_r /= L0.plan.size();
  const double m_per_px = 2.0 * kPi * mean_r / width;

  std::vector<double> cur = layout_params(L0);
  const size_t dim = cur.size();
  double cur_score = score_layout(L0, corner_map, boundary_map, w);
  std::vector<double> best = cur;
  double best_score = cur_score;

  std::mt19937_64 rng(params.rng_seed);
  std::vector<size_t> order(dim);
  std::iota(order.begin(), order.end(), size_t{0});
  const size_t subset = (dim + 1) / 2;
  const double h = params.fd_h_px * m_per_px;
  double step = params.step_px * m_per_px;

  for (int iter = 0; iter < params.max_iters && step >= params.eps; ++iter) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> g(dim, 0.0);
    double norm2 = 0.0;
    for (size_t s = 0; s < subset; ++s) {
      const size_t k = order[s];
      std::vector<double> p = cur;
      p[k] = cur[k] + h;
      const ManhattanLayout hi = layout_from_params(L0, p);
      p[k] = cur[k] - h;
      const ManhattanLayout lo = layout_from_params(L0, p);
      if (!layout_is_valid(hi) || !layout_is_valid(lo)) continue;
      g[k] = (score_layout(hi, corner_map, boundary_map, w) -
              score_layout(lo, corner_map, boundary_map, w)) /
             (2 * h);
      norm2 += g[k] * g[k];
    }

    bool accepted = false;
    if (norm2 > 1e-24) {
      const double scale = step / std::sqrt(norm2);
      std::vector<double> cand = cur;
      for (size_t k = 0; k < dim; ++k) cand[k] += scale * g[k];
      const ManhattanLayout L = layout_from_params(L0, cand);
      if (layout_is_valid(L)) {
        const double s = score_layout(L, corner_map, boundary_map, w);
        if (s > cur_score) {
          cur = std::move(cand);
          cur_score = s;
          accepted = true;
          if (s > best_score) {
            best = cur;
            best_score = s;
          }
        }
      }
    }
    step = accepted ? params.step_px * m_per_px : step * 0.5;
    if (info) {
      info->best_scores.push_back(best_score);
      if (accepted) ++info->accepted;
    }
  }
  return layout_from_params(L0, best);
}

ManhattanLayout fit_equirect(const EquirectMaps& maps, const ScoreWeights& w,
                             const EquirectFitParams& params) {
  const CornerSet2D corners = extract_corner_candidates(maps.corners, params);
  const ManhattanLayout L0 =
      init_layout(corners, maps.corners.width, maps.corners.height);
  return refine_layout(L0, maps.corners, maps.boundaries, w, params);
}

}  // namespace panolayout
