#include "panolayout/alignment.hpp"

#include <algorithm>
#include <cmath>

#include "panolayout/errors.hpp"

namespace panolayout {

static constexpr double kPi = 3.14159265358979323846;

Matrix3d ManhattanFrame::rotation() const {
  Matrix3d R;
  R.col(0) = x;
  R.col(1) = y;
  R.col(2) = z;
  return R;
}

namespace {

// Channel max, not luma: class-coded line maps carry one class per channel,
// and luma weights would push the third class under the gradient threshold.
Image to_gray(const Image& img) {
  if (img.channels == 1) return img;
  Image out(img.width, img.height, 1);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      float m = img.at(x, y, 0);
      for (int c = 1; c < img.channels; ++c) m = std::max(m, img.at(x, y, c));
      out.at(x, y, 0) = m;
    }
  return out;
}

struct ViewSegments {
  const AlignParams& params;
  const Matrix3d cam_to_world;
  const double focal;
  const int size;
  std::vector<LineSegment>& out;
  int view_id;

  void detect(const Image& view) {
    // Pre-blur: 1 px lines resampled from the pano carry sub-pixel wobble
    // that flips the local edge orientation; smoothing keeps them coherent.
    const Image gray = gaussian_blur(to_gray(view), 1.0);
    const int w = gray.width, h = gray.height;
    std::vector<float> ang(static_cast<size_t>(w) * h, -1.f);
    for (int y = 1; y < h - 1; ++y)
      for (int x = 1; x < w - 1; ++x) {
        const auto p = [&](int dx, int dy) { return gray.at(x + dx, y + dy, 0); };
        const float sx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) -
                         (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
        const float sy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) -
                         (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
        if (std::hypot(sx, sy) < params.grad_threshold) continue;
        // Edge direction is perpendicular to the gradient, folded to [0, pi).
        double a = std::atan2(sy, sx) + 0.5 * kPi;
        ang[y * w + x] = static_cast<float>(std::fmod(a + 2 * kPi, kPi));
      }
    const auto coherent = [](float a, float b) {
      const double d = std::abs(a - b);
      return std::min(d, kPi - d) <= kPi / 8;
    };

    // Connected components among edge pixels whose orientation stays within
    // a bin width of the seed pixel (8-neighborhood); anchoring to the seed
    // stops gradual drift from chaining curved structures together.
    std::vector<int> label(ang.size(), 0);
    std::vector<int> stack;
    int next = 0;
    for (int y0 = 1; y0 < h - 1; ++y0)
      for (int x0 = 1; x0 < w - 1; ++x0) {
        const int p0 = y0 * w + x0;
        if (ang[p0] < 0 || label[p0]) continue;
        const int id = ++next;
        label[p0] = id;
        stack.assign(1, p0);
        std::vector<Vector2d> px;
        while (!stack.empty()) {
          const int p = stack.back();
          stack.pop_back();
          const int x = p % w, y = p / w;
          px.emplace_back(x, y);
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              const int q = (y + dy) * w + (x + dx);
              if (label[q] || ang[q] < 0 || !coherent(ang[q], ang[p0]))
                continue;
              label[q] = id;
              stack.push_back(q);
            }
        }
        emit(px);
      }
  }

  void emit(const std::vector<Vector2d>& px) {
    if (px.size() < 2) return;
    Vector2d mu = Vector2d::Zero();
    for (const auto& p : px) mu += p;
    mu /= double(px.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : px) {
      const Vector2d d = p - mu;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    const Vector2d dir = es.eigenvectors().col(1);
    double lo = 1e30, hi = -1e30, res2 = 0.0;
    for (const auto& p : px) {
      const Vector2d d = p - mu;
      const double t = d.dot(dir);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
      const double r = d.x() * dir.y() - d.y() * dir.x();
      res2 += r * r;
    }
    if (hi - lo < params.min_length_px) return;
    if (std::sqrt(res2 / px.size()) > params.max_rms_px) return;

    auto lift = [&](const Vector2d& p) {
      const Vector3d cam(p.x() + 0.5 - 0.5 * size, 0.5 * size - (p.y() + 0.5),
                         focal);
      return Vector3d((cam_to_world * cam).normalized());
    };
    out.push_back({lift(mu + lo * dir), lift(mu + hi * dir), view_id});
  }
};

Vector3d circle_normal(const LineSegment& s) {
  return s.a.cross(s.b).normalized();
}

}  // namespace

std::vector<LineSegment> detect_segments_naive(const Image& pano,
                                               const AlignParams& params) {
  std::vector<Matrix3d> views;
  for (int k = 0; k < 8; ++k) views.push_back(rot_y(k * kPi / 4));
  // Up and down at every cardinal yaw; with only half of these, boundaries
  // of near walls along one axis can miss every view frustum.
  for (int k = 0; k < 4; ++k) {
    views.push_back(rot_y(k * kPi / 2) * rot_x(-kPi / 4));
    views.push_back(rot_y(k * kPi / 2) * rot_x(kPi / 4));
  }

  std::vector<LineSegment> segments;
  const PerspectiveConfig cfg{params.view_fov_deg, params.view_size};
  for (size_t i = 0; i < views.size(); ++i) {
    const Image view =
        render_view(pano, views[i], params.view_fov_deg, params.view_size);
    ViewSegments vs{params, views[i], focal_px(cfg), params.view_size,
                    segments, static_cast<int>(i)};
    vs.detect(view);
  }
  return segments;
}

ManhattanFrame vote_vanishing_directions(const std::vector<LineSegment>& segs,
                                         const AlignParams& params) {
  if (segs.size() < 3) throw FrameNotFound("fewer than 3 line segments");
  std::vector<Vector3d> normals;
  normals.reserve(segs.size());
  for (const auto& s : segs) normals.push_back(circle_normal(s));

  // Candidate directions over the upper hemisphere.
  const int n_el = static_cast<int>(90.0 / params.bin_deg);
  const int n_az = static_cast<int>(360.0 / params.bin_deg);
  std::vector<Vector3d> cells;
  cells.reserve(static_cast<size_t>(n_el) * n_az);
  for (int e = 0; e < n_el; ++e)
    for (int a = 0; a < n_az; ++a) {
      const double el = (e + 0.5) * params.bin_deg * kPi / 180.0;
      const double az = (a + 0.5) * params.bin_deg * kPi / 180.0;
      cells.emplace_back(std::cos(el) * std::sin(az), std::sin(el),
                         std::cos(el) * std::cos(az));
    }

  const double band = std::sin(params.bin_deg * kPi / 180.0);
  std::vector<int> votes(cells.size(), 0);
  for (size_t c = 0; c < cells.size(); ++c)
    for (const Vector3d& n : normals)
      if (std::abs(cells[c].dot(n)) <= band) ++votes[c];

  const double ortho = std::sin(params.ortho_tol_deg * kPi / 180.0);
  auto best_cell = [&](const Vector3d* d1, const Vector3d* d2) {
    int best = -1;
    for (size_t c = 0; c < cells.size(); ++c) {
      if (votes[c] < params.min_votes) continue;
      if (d1 && std::abs(cells[c].dot(*d1)) > ortho) continue;
      if (d2 && std::abs(cells[c].dot(*d2)) > ortho) continue;
      if (best < 0 || votes[c] > votes[best]) best = static_cast<int>(c);
    }
    return best;
  };

  const int c1 = best_cell(nullptr, nullptr);
  if (c1 < 0) throw FrameNotFound("no direction reaches the vote floor");
  const int c2 = best_cell(&cells[c1], nullptr);
  if (c2 < 0) throw FrameNotFound("no orthogonal second direction");
  const int c3 = best_cell(&cells[c1], &cells[c2]);
  if (c3 < 0) throw FrameNotFound("no orthogonal third direction");

  std::vector<double> arc(segs.size());
  for (size_t i = 0; i < segs.size(); ++i)
    arc[i] = std::acos(std::clamp(segs[i].a.dot(segs[i].b), -1.0, 1.0));

  // Refine each direction as the least-squares common orthogonal of its
  // member normals, arc-length weighted: long arcs pin their great circle
  // far better than short ones. Second pass re-selects members around the
  // refined direction.
  auto refine = [&](const Vector3d& d0) {
    Vector3d d = d0;
    for (int pass = 0; pass < 2; ++pass) {
      Matrix3d m = Matrix3d::Zero();
      int used = 0;
      for (size_t i = 0; i < normals.size(); ++i)
        if (std::abs(d.dot(normals[i])) <= band) {
          m += arc[i] * (normals[i] * normals[i].transpose());
          ++used;
        }
      if (used < params.min_votes) return d;
      Eigen::SelfAdjointEigenSolver<Matrix3d> es(m);
      const Vector3d next = es.eigenvectors().col(0);
      d = next.dot(d) < 0 ? -next : next;
    }
    return d;
  };
  // Priority Gram-Schmidt: the top-voted direction is the best constrained,
  // so it stays fixed rather than letting an SVD average its error with the
  // weaker two; the third axis is a pure cross product.
  const Vector3d d1 = refine(cells[c1]);
  Vector3d d2 = refine(cells[c2]);
  d2 = (d2 - d2.dot(d1) * d1).normalized();
  Matrix3d Q;
  Q.col(0) = d1;
  Q.col(1) = d2;
  Q.col(2) = d1.cross(d2);

  int iy = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(Q.col(i).y()) > std::abs(Q.col(iy).y())) iy = i;
  Vector3d yhat = Q.col(iy);
  if (yhat.y() < 0) yhat = -yhat;
  int iz = -1;
  for (int i = 0; i < 3; ++i) {
    if (i == iy) continue;
    if (iz < 0 || std::abs(Q.col(i).z()) > std::abs(Q.col(iz).z())) iz = i;
  }
  Vector3d zhat = Q.col(iz);
  if (zhat.z() < 0) zhat = -zhat;
  const Vector3d xhat = yhat.cross(zhat);

  ManhattanFrame frame{xhat, yhat, zhat};
  return frame;
}

Image align_panorama(const Image& pano, const ManhattanFrame& frame) {
  return rotate_panorama(pano, frame.rotation().transpose());
}

Image rasterize_line_map(const std::vector<LineSegment>& segs,
                         const ManhattanFrame& frame, int width, int height) {
  Image map(width, height, 3, 0.f);
  const Vector3d axes[3] = {frame.x, frame.y, frame.z};
  for (const auto& s : segs) {
    const Vector3d n = circle_normal(s);
    int axis = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(n.dot(axes[k])) < std::abs(n.dot(axes[axis]))) axis = k;

    const double angle = std::acos(std::clamp(s.a.dot(s.b), -1.0, 1.0));
    if (angle < 1e-9) continue;
    const int steps =
        std::max(2, static_cast<int>(std::ceil(angle * height / kPi * 2)));
    const Vector3d ortho = (s.b - s.a.dot(s.b) * s.a).normalized();
    for (int t = 0; t <= steps; ++t) {
      const double a = angle * t / steps;
      const Vector3d d = std::cos(a) * s.a + std::sin(a) * ortho;
      const Vector2d p = sphere_to_equirect(d);
      const int x = static_cast<int>(std::lround(u_from_px(p.x(), width)));
      const int y = static_cast<int>(std::lround(v_from_py(p.y(), height)));
      const int xw = ((x % width) + width) % width;
      if (y < 0 || y >= height) continue;
      map.at(xw, y, axis) = 1.f;
    }
  }
  return map;
}

}  // namespace panolayout
