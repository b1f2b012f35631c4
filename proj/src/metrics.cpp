#include "panolayout/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "panolayout/errors.hpp"

namespace panolayout {

namespace {

double wrapped_dist(const Vector2d& a, const Vector2d& b, int width) {
  double du = std::abs(a.x() - b.x());
  du = std::min(du, width - du);
  const double dv = a.y() - b.y();
  return std::sqrt(du * du + dv * dv);
}

// Intersection area of two rectilinear polygons via the exact cell
// decomposition induced by the union of both coordinate sets.
double rectilinear_intersection(const std::vector<Vector2d>& a,
                                const std::vector<Vector2d>& b) {
  std::set<double> xs_set, zs_set;
  for (const auto& p : a) {
    xs_set.insert(p.x());
    zs_set.insert(p.y());
  }
  for (const auto& p : b) {
    xs_set.insert(p.x());
    zs_set.insert(p.y());
  }
  const std::vector<double> xs(xs_set.begin(), xs_set.end());
  const std::vector<double> zs(zs_set.begin(), zs_set.end());
  double inter = 0.0;
  for (size_t i = 0; i + 1 < xs.size(); ++i)
    for (size_t j = 0; j + 1 < zs.size(); ++j) {
      const Vector2d c(0.5 * (xs[i] + xs[i + 1]), 0.5 * (zs[j] + zs[j + 1]));
      if (point_in_plan(a, c) && point_in_plan(b, c))
        inter += (xs[i + 1] - xs[i]) * (zs[j + 1] - zs[j]);
    }
  return inter;
}

}  // namespace

double corner_error(const CornerSet2D& pred, const CornerSet2D& gt, int width,
                    int height) {
  const size_t n = pred.pairs.size();
  if (n != gt.pairs.size())
    throw CountMismatch("corner sets differ in cardinality");
  if (n == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < n; ++k) {
    double cost = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const CornerPair& p = pred.pairs[i];
      const CornerPair& g = gt.pairs[(i + k) % n];
      cost += wrapped_dist(p.ceil_uv, g.ceil_uv, width) +
              wrapped_dist(p.floor_uv, g.floor_uv, width);
    }
    best = std::min(best, cost);
  }
  const double diag = std::hypot(double(width), double(height));
  return best / (2.0 * n) / diag * 100.0;
}

double pixel_error(const ManhattanLayout& pred, const ManhattanLayout& gt,
                   int width, int height) {
  const Image sp = render_semantics(pred, width, height);
  const Image sg = render_semantics(gt, width, height);
  size_t bad = 0;
  for (size_t i = 0; i < sp.data.size(); ++i)
    if (sp.data[i] != sg.data[i]) ++bad;
  return 100.0 * bad / sp.data.size();
}

double iou2d(const std::vector<Vector2d>& a, const std::vector<Vector2d>& b) {
  const double inter = rectilinear_intersection(a, b);
  const double uni = plan_area(a) + plan_area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return 100.0 * inter / uni;
}

double iou3d(const ManhattanLayout& a, const ManhattanLayout& b) {
  const ManhattanLayout an = rescale_to_camera_height(a, 1.6);
  const ManhattanLayout bn = rescale_to_camera_height(b, 1.6);
  const double inter_plan = rectilinear_intersection(an.plan, bn.plan);
  const double overlap =
      an.cam_to_floor + std::min(an.cam_to_ceiling, bn.cam_to_ceiling);
  const double vi = inter_plan * overlap;
  const double va = plan_area(an.plan) * an.height();
  const double vb = plan_area(bn.plan) * bn.height();
  const double vu = va + vb - vi;
  if (vu <= 0.0) return 0.0;
  return 100.0 * vi / vu;
}

double depth_rmse(const DepthMap& pred, const DepthMap& gt) {
  double acc = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < gt.depth.size(); ++i) {
    if (!gt.valid[i]) continue;
    const double d = static_cast<double>(pred.depth[i]) - gt.depth[i];
    acc += d * d;
    ++n;
  }
  return n ? std::sqrt(acc / n) : 0.0;
}

double depth_delta1(const DepthMap& pred, const DepthMap& gt) {
  size_t ok = 0, n = 0;
  for (size_t i = 0; i < gt.depth.size(); ++i) {
    if (!gt.valid[i]) continue;
    ++n;
    const double p = pred.depth[i], g = gt.depth[i];
    if (p <= 0.0 || g <= 0.0) continue;
    if (std::max(p / g, g / p) < 1.25) ++ok;
  }
  return n ? static_cast<double>(ok) / n : 1.0;
}

DepthMap mask_gt_depth(const DepthMap& gt, const ManhattanLayout& gt_layout,
                       double threshold) {
  const DepthMap rendered = render_depth(
      rescale_to_camera_height(gt_layout, 1.6), gt.width, gt.height);
  DepthMap out = gt;
  for (size_t i = 0; i < out.depth.size(); ++i)
    if (out.valid[i] &&
        std::abs(double(gt.depth[i]) - rendered.depth[i]) > threshold)
      out.valid[i] = 0;
  return out;
}

double bce_loss(const Image& pred, const Image& gt) {
  double acc = 0.0;
  for (size_t i = 0; i < pred.data.size(); ++i) {
    const double p = std::clamp(double(pred.data[i]), 1e-7, 1.0 - 1e-7);
    const double t = gt.data[i];
    acc -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
  }
  return acc / pred.data.size();
}

double l1_loss(const Image& pred, const Image& gt) {
  double acc = 0.0;
  for (size_t i = 0; i < pred.data.size(); ++i)
    acc += std::abs(double(pred.data[i]) - gt.data[i]);
  return acc / pred.data.size();
}

double loss_equirect(const EquirectMaps& pred, const EquirectMaps& gt,
                     double alpha, double beta) {
  return alpha * bce_loss(pred.boundaries, gt.boundaries) +
         beta * bce_loss(pred.corners, gt.corners);
}

double loss_ceiling(const CeilingMaps& pred, const CeilingMaps& gt,
                    double pred_height, double gt_height, double gamma) {
  return bce_loss(pred.fc, gt.fc) + bce_loss(pred.fp, gt.fp) +
         gamma * std::abs(pred_height - gt_height);
}

double loss_columns(const ColumnPrediction& pred, const ColumnPrediction& gt) {
  double l1 = 0.0;
  const size_t w = gt.ceiling_v.size();
  for (size_t i = 0; i < w; ++i) {
    l1 += std::abs(pred.ceiling_v[i] - gt.ceiling_v[i]);
    l1 += std::abs(pred.floor_v[i] - gt.floor_v[i]);
  }
  l1 /= 2.0 * w;
  double bce = 0.0;
  for (size_t i = 0; i < w; ++i) {
    const double p = std::clamp(pred.corner_prob[i], 1e-7, 1.0 - 1e-7);
    const double t = gt.corner_prob[i];
    bce -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
  }
  return l1 + bce / w;
}

int ConfusionMatrix::bucket(int corners) {
  if (corners <= 4) return 0;
  if (corners <= 6) return 1;
  if (corners <= 8) return 2;
  return 3;
}

LayoutEval evaluate_layouts(const ManhattanLayout& pred,
                            const ManhattanLayout& gt, int width, int height,
                            const DepthMap* gt_depth) {
  LayoutEval ev;
  ev.corners_pred = static_cast<int>(pred.plan.size());
  ev.corners_gt = static_cast<int>(gt.plan.size());
  ev.count_match = ev.corners_pred == ev.corners_gt;
  const ManhattanLayout pn = rescale_to_camera_height(pred, 1.6);
  const ManhattanLayout gn = rescale_to_camera_height(gt, 1.6);
  ev.iou2d_pct = iou2d(pn.plan, gn.plan);
  ev.iou3d_pct = iou3d(pn, gn);
  ev.pixel_err_pct = pixel_error(pn, gn, width, height);
  if (ev.count_match)
    ev.corner_err_pct = corner_error(project_corners(pn, width, height),
                                     project_corners(gn, width, height),
                                     width, height);
  if (gt_depth) {
    const DepthMap dp = render_depth(pn, gt_depth->width, gt_depth->height);
    ev.rmse = depth_rmse(dp, *gt_depth);
    ev.delta1 = depth_delta1(dp, *gt_depth);
  }
  return ev;
}

}  // namespace panolayout
