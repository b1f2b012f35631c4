#include "panolayout/fit_ceiling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "panolayout/errors.hpp"

namespace {
constexpr double kPi = 3.14159265358979323846;
}

namespace panolayout {

void split_and_project_fc(const Image& fc, double H,
                          const PerspectiveConfig& cfg, Image* ceiling_view,
                          Image* floor_view) {
  if (H <= 1.6 + 1e-3)
    throw DegenerateHeight("layout height leaves no room below the camera");

  Image upper = fc, lower = fc;
  for (int y = 0; y < fc.height; ++y)
    for (int x = 0; x < fc.width; ++x) {
      if (y >= fc.height / 2) upper.at(x, y, 0) = 0.f;
      else lower.at(x, y, 0) = 0.f;
    }
  *ceiling_view = e2p_project(upper, cfg, true);
  // Mirror so both views share the plan axes, then undo the depth ratio of
  // the floor plane against the 1.6 m ceiling plane.
  *floor_view = scale_about_center(
      flip_vertical(e2p_project(lower, cfg, false)), 1.6 / (H - 1.6));
}

Image fuse_floor_plan(const Image& fp, const Image& ceiling_view,
                      const Image& floor_view) {
  if (!fp.same_shape(ceiling_view) || !fp.same_shape(floor_view))
    throw PipelineError("fuse inputs differ in shape");
  Image out = fp;
  for (size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = 0.5f * fp.data[i] + 0.25f * ceiling_view.data[i] +
                  0.25f * floor_view.data[i];
  return out;
}

Region extract_region(const Image& fused, double threshold) {
  const int w = fused.width, h = fused.height;
  std::vector<int> label(static_cast<size_t>(w) * h, 0);
  int next = 0, best_label = 0, best_count = 0;
  std::vector<int> stack;
  for (int y0 = 0; y0 < h; ++y0)
    for (int x0 = 0; x0 < w; ++x0) {
      if (fused.at(x0, y0, 0) < threshold || label[y0 * w + x0]) continue;
      const int id = ++next;
      int count = 0;
      stack.assign(1, y0 * w + x0);
      label[y0 * w + x0] = id;
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        ++count;
        const int x = p % w, y = p / w;
        const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
        for (const auto& n : nb) {
          if (n[0] < 0 || n[0] >= w || n[1] < 0 || n[1] >= h) continue;
          const int q = n[1] * w + n[0];
          if (label[q] || fused.at(n[0], n[1], 0) < threshold) continue;
          label[q] = id;
          stack.push_back(q);
        }
      }
      if (count > best_count) {
        best_count = count;
        best_label = id;
      }
    }
  if (best_label == 0) throw EmptyRegion("no pixel reaches the threshold");

  Region region;
  region.mask = Image(w, h, 1);
  region.x0 = w;
  region.y0 = h;
  region.x1 = -1;
  region.y1 = -1;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (label[y * w + x] != best_label) continue;
      region.mask.at(x, y, 0) = 1.f;
      region.x0 = std::min(region.x0, x);
      region.x1 = std::max(region.x1, x);
      region.y0 = std::min(region.y0, y);
      region.y1 = std::max(region.y1, y);
    }
  return region;
}

std::vector<Vector2d> trace_boundary(const Region& region) {
  const Image& m = region.mask;
  const int w = m.width, h = m.height;
  auto on = [&](int x, int y) {
    return x >= 0 && x < w && y >= 0 && y < h && m.at(x, y, 0) > 0.5f;
  };
  int sx = -1, sy = -1;
  for (int y = 0; y < h && sx < 0; ++y)
    for (int x = 0; x < w; ++x)
      if (m.at(x, y, 0) > 0.5f) {
        sx = x;
        sy = y;
        break;
      }

  // Clockwise ring in image coordinates starting west.
  static const int ring[8][2] = {{-1, 0}, {-1, -1}, {0, -1}, {1, -1},
                                 {1, 0},  {1, 1},   {0, 1},  {-1, 1}};
  auto ring_index = [](int dx, int dy) {
    for (int i = 0; i < 8; ++i)
      if (ring[i][0] == dx && ring[i][1] == dy) return i;
    return 0;
  };

  // Scan clockwise from just past the previous pixel; the walk state
  // (pixel, entry direction) repeats exactly when the circuit closes.
  std::vector<Vector2d> loop;
  int cx = sx, cy = sy, px = sx - 1, py = sy;
  std::set<std::array<int, 3>> seen;
  const size_t limit = static_cast<size_t>(w) * h * 8 + 8;
  for (size_t step = 0; step < limit; ++step) {
    const int d = ring_index(px - cx, py - cy);
    if (!seen.insert({cx, cy, d}).second) break;
    loop.emplace_back(cx, cy);
    int found = -1;
    for (int k = 1; k <= 8; ++k) {
      const int idx = (d + k) % 8;
      if (on(cx + ring[idx][0], cy + ring[idx][1])) {
        found = idx;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    px = cx;
    py = cy;
    cx += ring[found][0];
    cy += ring[found][1];
  }
  if (loop.size() > 1 &&
      loop.front().x() == loop.back().x() &&
      loop.front().y() == loop.back().y())
    loop.pop_back();
  return loop;
}

namespace {

double point_segment_dist(const Vector2d& p, const Vector2d& a,
                          const Vector2d& b) {
  const Vector2d d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 < 1e-18) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

void dp_open(const std::vector<Vector2d>& pts, int i, int j, double eps,
             std::vector<char>& keep) {
  if (j <= i + 1) return;
  double worst = -1.0;
  int split = -1;
  for (int k = i + 1; k < j; ++k) {
    const double d = point_segment_dist(pts[k], pts[i], pts[j]);
    if (d > worst) {
      worst = d;
      split = k;
    }
  }
  if (worst <= eps) return;
  keep[split] = 1;
  dp_open(pts, i, split, eps, keep);
  dp_open(pts, split, j, eps, keep);
}

std::vector<Vector2d> dp_chain(const std::vector<Vector2d>& pts, double eps) {
  const size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<char> keep(n, 0);
  keep[0] = 1;
  keep[n - 1] = 1;
  dp_open(pts, 0, static_cast<int>(n) - 1, eps, keep);
  std::vector<Vector2d> out;
  for (size_t i = 0; i < n; ++i)
    if (keep[i]) out.push_back(pts[i]);
  return out;
}

}  // namespace

std::vector<Vector2d> simplify_closed(const std::vector<Vector2d>& loop,
                                      double epsilon) {
  const size_t n = loop.size();
  if (n <= 3) return loop;
  size_t ai = 0, bi = 1;
  double best = -1.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      const double d = (loop[i] - loop[j]).squaredNorm();
      if (d > best) {
        best = d;
        ai = i;
        bi = j;
      }
    }
  std::vector<Vector2d> chain_a(loop.begin() + ai, loop.begin() + bi + 1);
  std::vector<Vector2d> chain_b(loop.begin() + bi, loop.end());
  chain_b.insert(chain_b.end(), loop.begin(), loop.begin() + ai + 1);

  const std::vector<Vector2d> sa = dp_chain(chain_a, epsilon);
  const std::vector<Vector2d> sb = dp_chain(chain_b, epsilon);
  std::vector<Vector2d> out(sa.begin(), sa.end() - 1);
  out.insert(out.end(), sb.begin(), sb.end() - 1);
  return out;
}

namespace {

struct WeightedVal {
  double v, w;
};

// Single-linkage 1-D clustering; centers are length-weighted means.
std::vector<double> cluster_1d(std::vector<WeightedVal> vals, double radius) {
  std::sort(vals.begin(), vals.end(),
            [](const WeightedVal& a, const WeightedVal& b) { return a.v < b.v; });
  std::vector<double> centers;
  size_t i = 0;
  while (i < vals.size()) {
    size_t j = i + 1;
    while (j < vals.size() && vals[j].v - vals[j - 1].v <= radius) ++j;
    double num = 0.0, den = 0.0;
    for (size_t k = i; k < j; ++k) {
      num += vals[k].v * vals[k].w;
      den += vals[k].w;
    }
    centers.push_back(den > 0 ? num / den : vals[i].v);
    i = j;
  }
  return centers;
}

}  // namespace

std::vector<Vector2d> regularize_manhattan(const std::vector<Vector2d>& poly,
                                           const Region& region,
                                           const PerspectiveConfig& cfg,
                                           const CeilingFitParams& params) {
  const size_t n = poly.size();
  if (n < 4) throw NonRectilinear("simplified boundary has too few vertices");

  std::vector<WeightedVal> xs, ys;
  double total_len = 0.0, diag_len = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vector2d& a = poly[i];
    const Vector2d& b = poly[(i + 1) % n];
    const double dx = std::abs(b.x() - a.x());
    const double dy = std::abs(b.y() - a.y());
    const double len = std::hypot(dx, dy);
    total_len += len;
    if (dx >= 2.0 * dy)
      ys.push_back({0.5 * (a.y() + b.y()), len});
    else if (dy >= 2.0 * dx)
      xs.push_back({0.5 * (a.x() + b.x()), len});
    else
      diag_len += len;
  }
  if (diag_len > 0.5 * total_len || xs.empty() || ys.empty())
    throw NonRectilinear("diagonal edges dominate the boundary");

  // Grid lines; the bounding-rectangle borders absorb nearby clusters.
  const double bx0 = region.x0 - 0.5, bx1 = region.x1 + 0.5;
  const double by0 = region.y0 - 0.5, by1 = region.y1 + 0.5;
  auto build_lines = [&](std::vector<WeightedVal>& vals, double lo, double hi) {
    std::vector<double> lines{lo, hi};
    for (double c : cluster_1d(std::move(vals), params.cluster_radius))
      if (c > lo + params.cluster_radius && c < hi - params.cluster_radius)
        lines.push_back(c);
    std::sort(lines.begin(), lines.end());
    return lines;
  };
  const std::vector<double> lx = build_lines(xs, bx0, bx1);
  const std::vector<double> ly = build_lines(ys, by0, by1);
  const int ncx = static_cast<int>(lx.size()) - 1;
  const int ncy = static_cast<int>(ly.size()) - 1;

  // Mask coverage per cell via an integral image over pixel centers.
  const int w = region.mask.width, h = region.mask.height;
  std::vector<double> integral(static_cast<size_t>(w + 1) * (h + 1), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      integral[(y + 1) * (w + 1) + x + 1] =
          region.mask.at(x, y, 0) + integral[y * (w + 1) + x + 1] +
          integral[(y + 1) * (w + 1) + x] - integral[y * (w + 1) + x];
  auto rect_sum = [&](int x0, int y0, int x1, int y1) {  // inclusive
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, w - 1);
    y1 = std::min(y1, h - 1);
    if (x0 > x1 || y0 > y1) return 0.0;
    return integral[(y1 + 1) * (w + 1) + x1 + 1] -
           integral[y0 * (w + 1) + x1 + 1] - integral[(y1 + 1) * (w + 1) + x0] +
           integral[y0 * (w + 1) + x0];
  };

  std::vector<char> keep(static_cast<size_t>(ncx) * ncy, 0);
  for (int j = 0; j < ncy; ++j)
    for (int i = 0; i < ncx; ++i) {
      const int px0 = static_cast<int>(std::ceil(lx[i]));
      const int px1 = static_cast<int>(std::ceil(lx[i + 1])) - 1;
      const int py0 = static_cast<int>(std::ceil(ly[j]));
      const int py1 = static_cast<int>(std::ceil(ly[j + 1])) - 1;
      const double pixels = double(px1 - px0 + 1) * double(py1 - py0 + 1);
      if (px1 < px0 || py1 < py0) continue;
      keep[j * ncx + i] =
          rect_sum(px0, py0, px1, py1) / pixels > params.coverage;
    }

  // Fill holes: complement cells not reachable from the grid border.
  {
    std::vector<char> outside(keep.size(), 0);
    std::queue<int> q;
    for (int j = 0; j < ncy; ++j)
      for (int i = 0; i < ncx; ++i) {
        const bool border = i == 0 || j == 0 || i == ncx - 1 || j == ncy - 1;
        if (border && !keep[j * ncx + i] && !outside[j * ncx + i]) {
          outside[j * ncx + i] = 1;
          q.push(j * ncx + i);
        }
      }
    while (!q.empty()) {
      const int p = q.front();
      q.pop();
      const int i = p % ncx, j = p / ncx;
      const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& c : nb) {
        if (c[0] < 0 || c[0] >= ncx || c[1] < 0 || c[1] >= ncy) continue;
        const int idx = c[1] * ncx + c[0];
        if (keep[idx] || outside[idx]) continue;
        outside[idx] = 1;
        q.push(idx);
      }
    }
    for (size_t i = 0; i < keep.size(); ++i)
      if (!keep[i] && !outside[i]) keep[i] = 1;
  }

  // The union must be one 4-connected piece containing the camera cell.
  {
    int total = 0, first = -1;
    for (size_t i = 0; i < keep.size(); ++i)
      if (keep[i]) {
        ++total;
        if (first < 0) first = static_cast<int>(i);
      }
    if (total == 0) throw NonRectilinear("no grid cell kept");
    std::vector<char> vis(keep.size(), 0);
    std::queue<int> q;
    q.push(first);
    vis[first] = 1;
    int reached = 0;
    while (!q.empty()) {
      const int p = q.front();
      q.pop();
      ++reached;
      const int i = p % ncx, j = p / ncx;
      const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& c : nb) {
        if (c[0] < 0 || c[0] >= ncx || c[1] < 0 || c[1] >= ncy) continue;
        const int idx = c[1] * ncx + c[0];
        if (!keep[idx] || vis[idx]) continue;
        vis[idx] = 1;
        q.push(idx);
      }
    }
    if (reached != total) throw NonRectilinear("cell union is disconnected");

    const double cc = 0.5 * cfg.size - 0.5;  // camera pixel coordinate
    const auto cell_of = [](const std::vector<double>& lines, double v) {
      const auto it = std::upper_bound(lines.begin(), lines.end(), v);
      return static_cast<int>(it - lines.begin()) - 1;
    };
    const int ci = cell_of(lx, cc), cj = cell_of(ly, cc);
    if (ci < 0 || ci >= ncx || cj < 0 || cj >= ncy || !keep[cj * ncx + ci])
      throw NonRectilinear("camera falls outside the cell union");
  }

  // Walk the union boundary over grid nodes. Each kept cell contributes its
  // exposed sides, oriented consistently so shared sides cancel.
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;
  auto kept = [&](int i, int j) {
    return i >= 0 && i < ncx && j >= 0 && j < ncy && keep[j * ncx + i];
  };
  size_t edge_count = 0;
  for (int j = 0; j < ncy; ++j)
    for (int i = 0; i < ncx; ++i) {
      if (!keep[j * ncx + i]) continue;
      const std::pair<int, int> tl{i, j}, tr{i + 1, j}, br{i + 1, j + 1},
          bl{i, j + 1};
      if (!kept(i, j - 1)) edges[tl].push_back(tr), ++edge_count;
      if (!kept(i + 1, j)) edges[tr].push_back(br), ++edge_count;
      if (!kept(i, j + 1)) edges[br].push_back(bl), ++edge_count;
      if (!kept(i - 1, j)) edges[bl].push_back(tl), ++edge_count;
    }
  for (const auto& [node, outs] : edges)
    if (outs.size() > 1) throw NonRectilinear("cell union is pinched");

  const std::pair<int, int> start = edges.begin()->first;
  std::vector<std::pair<int, int>> nodes{start};
  std::pair<int, int> cur = edges.at(start).front();
  size_t used = 1;
  while (cur != start) {
    nodes.push_back(cur);
    const auto it = edges.find(cur);
    if (it == edges.end()) throw NonRectilinear("open boundary chain");
    cur = it->second.front();
    if (++used > edge_count) throw NonRectilinear("boundary chain cycles");
  }
  if (used != edge_count) throw NonRectilinear("cell union has extra loops");

  std::vector<Vector2d> out;
  const size_t m = nodes.size();
  for (size_t k = 0; k < m; ++k) {
    const auto& prev = nodes[(k + m - 1) % m];
    const auto& here = nodes[k];
    const auto& next = nodes[(k + 1) % m];
    const bool collinear = (prev.first == here.first) == (here.first == next.first);
    if (!collinear) out.emplace_back(lx[here.first], ly[here.second]);
  }
  if (out.size() < 4) throw NonRectilinear("degenerate cell union");
  return out;
}

namespace {

float at_clamped(const Image& img, int x, int y) {
  x = std::clamp(x, 0, img.width - 1);
  y = std::clamp(y, 0, img.height - 1);
  return img.at(x, y, 0);
}

// Pixel-center coordinates quantize every wall to the grid; recover the
// subpixel position of each polygon edge as the mean threshold crossing of
// the fused map across the edge, sampled along its span. Edges keep their
// axes, so the polygon stays rectilinear.
std::vector<Vector2d> refine_edges(const Image& fused,
                                   const std::vector<Vector2d>& poly,
                                   double threshold) {
  const int n = static_cast<int>(poly.size());
  std::vector<double> coord(n);
  std::vector<bool> vertical(n);
  for (int k = 0; k < n; ++k) {
    const Vector2d& a = poly[k];
    const Vector2d& b = poly[(k + 1) % n];
    vertical[k] = std::abs(b.x() - a.x()) < std::abs(b.y() - a.y());
    const double c = vertical[k] ? a.x() : a.y();
    const double lo = vertical[k] ? std::min(a.y(), b.y())
                                  : std::min(a.x(), b.x());
    const double hi = vertical[k] ? std::max(a.y(), b.y())
                                  : std::max(a.x(), b.x());
    const double margin = std::min(1.5, 0.25 * (hi - lo));
    int t0 = static_cast<int>(std::ceil(lo + margin));
    int t1 = static_cast<int>(std::floor(hi - margin));
    if (t0 > t1) t0 = t1 = static_cast<int>(std::lround(0.5 * (lo + hi)));
    const int ci = static_cast<int>(std::lround(c));
    double acc = 0.0;
    int cnt = 0;
    for (int t = t0; t <= t1; ++t) {
      double samp[9];
      double vmin = 1e9, vmax = -1e9;
      for (int i = -4; i <= 4; ++i) {
        samp[i + 4] = vertical[k] ? at_clamped(fused, ci + i, t)
                                  : at_clamped(fused, t, ci + i);
        vmin = std::min(vmin, samp[i + 4]);
        vmax = std::max(vmax, samp[i + 4]);
      }
      // The wall ramp loses half its contrast where one of the projected
      // hemisphere views runs out of coverage; crossing the midpoint of the
      // locally observed range stays centered on the ramp either way.
      if (vmax - vmin < 0.5 * threshold) continue;
      const double tl = 0.5 * (vmin + vmax);
      double best = 0.0, best_dist = 1e9;
      for (int i = 0; i < 8; ++i) {
        const double p0 = samp[i], p1 = samp[i + 1];
        if ((p0 >= tl) == (p1 >= tl) || p0 == p1) continue;
        const double x = ci + i - 4 + (tl - p0) / (p1 - p0);
        if (std::abs(x - c) < best_dist) {
          best_dist = std::abs(x - c);
          best = x;
        }
      }
      if (best_dist < 3.0) {
        acc += best;
        ++cnt;
      }
    }
    coord[k] = cnt > 0 ? acc / cnt : c;
  }
  std::vector<Vector2d> out(n);
  for (int k = 0; k < n; ++k) {
    const int prev = (k + n - 1) % n;
    // vertex k joins edge prev and edge k; one of them fixes each axis
    const double x = vertical[k] ? coord[k] : coord[prev];
    const double y = vertical[k] ? coord[prev] : coord[k];
    out[k] = {x, y};
  }
  return out;
}

}  // namespace

ManhattanLayout extrude(const std::vector<Vector2d>& plan_px, double H,
                        const PerspectiveConfig& cfg) {
  if (H <= 1.6 + 1e-3)
    throw DegenerateHeight("layout height leaves no room below the camera");
  ManhattanLayout layout;
  layout.cam_to_ceiling = 1.6;
  layout.cam_to_floor = H - 1.6;
  layout.plan.reserve(plan_px.size());
  for (const Vector2d& p : plan_px)
    layout.plan.push_back(view_px_to_plan(cfg, p, 1.6));
  if (plan_area(layout.plan) < 0)
    std::reverse(layout.plan.begin(), layout.plan.end());
  validate_layout(layout);
  return layout;
}

ManhattanLayout fit_ceiling(const CeilingMaps& maps, double H,
                            const PerspectiveConfig& cfg,
                            const CeilingFitParams& params) {
  Image mc, mf;
  split_and_project_fc(maps.fc, H, cfg, &mc, &mf);
  const Image fused = fuse_floor_plan(maps.fp, mc, mf);
  const Region region = extract_region(fused, params.threshold);

  std::vector<Vector2d> plan_px;
  if (params.cuboid) {
    plan_px = {{region.x0 - 0.5, region.y0 - 0.5},
               {region.x1 + 0.5, region.y0 - 0.5},
               {region.x1 + 0.5, region.y1 + 0.5},
               {region.x0 - 0.5, region.y1 + 0.5}};
  } else {
    const std::vector<Vector2d> loop = trace_boundary(region);
    const std::vector<Vector2d> poly = simplify_closed(loop, params.dp_epsilon);
    plan_px = regularize_manhattan(poly, region, cfg, params);
  }
  // Edge refinement samples the mc/mf average rather than the fused map: the
  // binary fp term steps at pixel boundaries and would bias the crossing by up
  // to ~0.3 px depending on subpixel phase, while the projected fc ramps stay
  // continuous across the wall.
  Image soft(fused.width, fused.height, 1);
  for (size_t i = 0; i < soft.data.size(); ++i)
    soft.data[i] = 0.5f * (mc.data[i] + mf.data[i]);
  plan_px = refine_edges(soft, plan_px, params.threshold);
  return extrude(plan_px, H, cfg);
}

double ceiling_height_from_columns(const ColumnPrediction& cols) {
  const int w = cols.width;
  const int h = w / 2;
  double acc = 0.0;
  int n = 0;
  for (int u = 0; u < w; ++u) {
    const double phi_f = 0.5 * kPi * py_from_v(cols.floor_v[u], h);
    const double phi_c = 0.5 * kPi * py_from_v(cols.ceiling_v[u], h);
    if (phi_f > -0.02 || phi_c < 0.02) continue;
    acc += std::tan(-phi_f) / std::tan(phi_c);
    ++n;
  }
  if (n < w / 8)
    throw InfeasibleLayout("boundary rows too degenerate for a height");
  return 1.6 * (1.0 + acc / n);
}

}  // namespace panolayout
