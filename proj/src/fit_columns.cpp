#include "panolayout/fit_columns.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "panolayout/errors.hpp"

namespace panolayout {

static constexpr double kPi = 3.14159265358979323846;

std::vector<int> find_peaks_circular(const std::vector<double>& signal,
                                     int min_dist, double threshold) {
  const int n = static_cast<int>(signal.size());
  std::vector<int> cand;
  for (int i = 0; i < n; ++i) {
    const double prev = signal[(i + n - 1) % n];
    const double next = signal[(i + 1) % n];
    if (signal[i] > prev && signal[i] >= next && signal[i] >= threshold)
      cand.push_back(i);
  }
  std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
    return signal[a] > signal[b];
  });
  std::vector<int> kept;
  for (int c : cand) {
    bool ok = true;
    for (int k : kept) {
      int d = std::abs(c - k);
      d = std::min(d, n - d);
      if (d < min_dist) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

double refine_peak(const std::vector<double>& signal, int i, bool circular) {
  const int n = static_cast<int>(signal.size());
  int l = i - 1, r = i + 1;
  if (circular) {
    l = (l + n) % n;
    r = r % n;
  } else if (l < 0 || r >= n) {
    return i;
  }
  const double a = signal[l], b = signal[i], c = signal[r];
  const double denom = a - 2 * b + c;
  if (std::abs(denom) < 1e-12) return i;
  return i + 0.5 * (a - c) / denom;
}

double estimate_height(const ColumnPrediction& cols, double cam_to_floor) {
  const int w = cols.width;
  const int h = w / 2;
  double acc = 0.0;
  int n = 0;
  for (int u = 0; u < w; ++u) {
    const double phi_f = 0.5 * kPi * py_from_v(cols.floor_v[u], h);
    const double phi_c = 0.5 * kPi * py_from_v(cols.ceiling_v[u], h);
    if (phi_f > -0.02 || phi_c < 0.02) continue;
    const double r = cam_to_floor / std::tan(-phi_f);
    acc += r * std::tan(phi_c);
    ++n;
  }
  if (n < w / 8)
    throw InfeasibleLayout("boundary rows too degenerate for a height");
  return cam_to_floor + acc / n;
}

BoundaryCloud project_boundary_points(const ColumnPrediction& cols, double H,
                                      double cam_to_floor) {
  const int w = cols.width;
  const int h = w / 2;
  const double cam_to_ceiling = H - cam_to_floor;
  BoundaryCloud cloud;
  for (int u = 0; u < w; ++u) {
    const double theta = kPi * px_from_u(u, w);
    const Vector2d dir(std::sin(theta), std::cos(theta));
    const double phi_c = 0.5 * kPi * py_from_v(cols.ceiling_v[u], h);
    if (phi_c > 0.02) {
      cloud.pts.push_back(dir * (cam_to_ceiling / std::tan(phi_c)));
      cloud.col.push_back(u);
    }
    const double phi_f = 0.5 * kPi * py_from_v(cols.floor_v[u], h);
    if (phi_f < -0.02) {
      cloud.pts.push_back(dir * (cam_to_floor / std::tan(-phi_f)));
      cloud.col.push_back(u);
    }
  }
  return cloud;
}

std::vector<WallSeg> fit_walls(
    const std::vector<std::vector<Vector2d>>& groups,
    const ColumnFitParams& params) {
  std::vector<WallSeg> walls;
  for (const auto& pts : groups) {
    if (pts.size() < 2) continue;
    Vector2d mu = Vector2d::Zero();
    for (const auto& p : pts) mu += p;
    mu /= double(pts.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : pts) {
      const Vector2d d = p - mu;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    const Vector2d dir = es.eigenvectors().col(1);  // largest eigenvalue
    const Vector2d nrm(-dir.y(), dir.x());

    // Vote for the line offset along the PCA direction.
    std::vector<double> off(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) off[i] = nrm.dot(pts[i]);
    int best = 0, best_count = -1;
    for (size_t i = 0; i < off.size(); ++i) {
      int count = 0;
      for (double o : off)
        if (std::abs(o - off[i]) <= params.inlier_dist) ++count;
      if (count > best_count) {
        best_count = count;
        best = static_cast<int>(i);
      }
    }

    WallSeg seg;
    seg.axis = std::abs(dir.x()) >= std::abs(dir.y()) ? 0 : 1;
    double acc = 0.0;
    int n = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
      if (std::abs(off[i] - off[best]) > params.inlier_dist) continue;
      acc += seg.axis == 0 ? pts[i].y() : pts[i].x();
      ++n;
    }
    seg.offset = acc / n;
    seg.gap_a = pts.front();
    seg.gap_b = pts.back();
    seg.inliers = n;
    walls.push_back(seg);
  }
  return walls;
}

ManhattanLayout hallucinate_occluded(std::vector<WallSeg> walls,
                                     double cam_to_floor,
                                     double cam_to_ceiling,
                                     double merge_dist) {
  if (walls.size() < 2) throw InfeasibleLayout("not enough walls");

  // Merge neighbors that describe the same wall.
  bool merged = true;
  while (merged && walls.size() > 1) {
    merged = false;
    for (size_t i = 0; i < walls.size(); ++i) {
      const size_t j = (i + 1) % walls.size();
      if (i == j) break;
      WallSeg& a = walls[i];
      const WallSeg& b = walls[j];
      if (a.axis != b.axis || std::abs(a.offset - b.offset) >= merge_dist)
        continue;
      const double wa = std::max(a.inliers, 0), wb = std::max(b.inliers, 0);
      a.offset = wa + wb > 0 ? (a.offset * wa + b.offset * wb) / (wa + wb)
                             : 0.5 * (a.offset + b.offset);
      a.gap_b = b.gap_b;
      a.inliers += b.inliers;
      walls.erase(walls.begin() + j);
      merged = true;
      break;
    }
  }
  if (walls.size() < 2) throw InfeasibleLayout("walls collapsed in merge");

  // Bridge same-axis neighbors with a perpendicular wall at the gap.
  std::vector<WallSeg> chain;
  for (size_t i = 0; i < walls.size(); ++i) {
    const WallSeg& a = walls[i];
    const WallSeg& b = walls[(i + 1) % walls.size()];
    chain.push_back(a);
    if (a.axis == b.axis) {
      WallSeg bridge;
      bridge.axis = 1 - a.axis;
      bridge.offset = a.axis == 0 ? 0.5 * (a.gap_b.x() + b.gap_a.x())
                                  : 0.5 * (a.gap_b.y() + b.gap_a.y());
      bridge.gap_a = a.gap_b;
      bridge.gap_b = b.gap_a;
      bridge.inliers = 0;
      chain.push_back(bridge);
    }
  }

  ManhattanLayout layout;
  layout.cam_to_floor = cam_to_floor;
  layout.cam_to_ceiling = cam_to_ceiling;
  for (size_t i = 0; i < chain.size(); ++i) {
    const WallSeg& a = chain[i];
    const WallSeg& b = chain[(i + 1) % chain.size()];
    if (a.axis == b.axis)
      throw InfeasibleLayout("contradictory wall chain");
    // Corner between wall a and wall b.
    layout.plan.push_back(a.axis == 0 ? Vector2d(b.offset, a.offset)
                                      : Vector2d(a.offset, b.offset));
  }
  if (plan_area(layout.plan) < 0)
    std::reverse(layout.plan.begin(), layout.plan.end());
  validate_layout(layout);
  return layout;
}

ManhattanLayout layout_from_azimuth_corners(const std::vector<Vector2d>& pts,
                                            double cam_to_floor,
                                            double cam_to_ceiling,
                                            double merge_dist) {
  const size_t n = pts.size();
  if (n < 3) throw InfeasibleLayout("too few corner estimates");

  // Classify each gap; -1 marks a diagonal gap hiding a corner.
  std::vector<int> axes(n);
  int anchor = -1;
  for (size_t i = 0; i < n; ++i) {
    const Vector2d d = pts[(i + 1) % n] - pts[i];
    const double dx = std::abs(d.x()), dz = std::abs(d.y());
    if (dx >= 2.0 * dz) axes[i] = 0;
    else if (dz >= 2.0 * dx) axes[i] = 1;
    else axes[i] = -1;
    if (axes[i] >= 0 && anchor < 0) anchor = static_cast<int>(i);
  }
  if (anchor < 0) throw InfeasibleLayout("all gaps diagonal");

  std::vector<WallSeg> walls;
  auto fixed_coord = [](const Vector2d& p, int axis) {
    return axis == 0 ? p.y() : p.x();
  };
  int last = axes[anchor];
  for (size_t t = 0; t < n; ++t) {
    const size_t g = (anchor + t) % n;
    const Vector2d& a = pts[g];
    const Vector2d& b = pts[(g + 1) % n];
    WallSeg seg;
    seg.gap_a = a;
    seg.gap_b = b;
    seg.inliers = 2;
    if (axes[g] >= 0) {
      seg.axis = axes[g];
      seg.offset = 0.5 * (fixed_coord(a, seg.axis) + fixed_coord(b, seg.axis));
      walls.push_back(seg);
      last = seg.axis;
    } else {
      // Hidden corner: leave a perpendicular to the arriving wall, then turn.
      seg.axis = 1 - last;
      seg.offset = fixed_coord(a, seg.axis);
      walls.push_back(seg);
      WallSeg seg2 = seg;
      seg2.axis = last;
      seg2.offset = fixed_coord(b, seg2.axis);
      seg2.inliers = 2;
      walls.push_back(seg2);
      last = seg2.axis;
    }
  }
  return hallucinate_occluded(std::move(walls), cam_to_floor, cam_to_ceiling,
                              merge_dist);
}

ManhattanLayout fit_columns(const ColumnPrediction& cols,
                            const ColumnFitParams& params) {
  const double H = estimate_height(cols, params.cam_to_floor);
  const BoundaryCloud cloud =
      project_boundary_points(cols, H, params.cam_to_floor);
  const std::vector<int> peaks = find_peaks_circular(
      cols.corner_prob, params.corner_min_sep, params.corner_threshold);
  if (peaks.size() < 4) throw TooFewCorners("fewer than 4 corner columns");

  // Group points by the corner-column span containing their column.
  const size_t k = peaks.size();
  std::vector<std::vector<Vector2d>> groups(k);
  for (size_t i = 0; i < cloud.pts.size(); ++i) {
    const int c = cloud.col[i];
    size_t gi = k - 1;
    for (size_t p = 0; p < k; ++p) {
      const int lo = peaks[p];
      const int hi = peaks[(p + 1) % k];
      const bool inside = lo <= hi ? (c >= lo && c < hi) : (c >= lo || c < hi);
      if (inside) {
        gi = p;
        break;
      }
    }
    groups[gi].push_back(cloud.pts[i]);
  }

  std::vector<WallSeg> walls = fit_walls(groups, params);
  return hallucinate_occluded(std::move(walls), params.cam_to_floor,
                              H - params.cam_to_floor, params.merge_dist);
}

}  // namespace panolayout
