#include <cmath>

#include <doctest.h>

#include "panolayout/errors.hpp"
#include "panolayout/fit_ceiling.hpp"
#include "panolayout/metrics.hpp"

using namespace panolayout;

namespace {

double iou_vs_gt(const ManhattanLayout& fit, const ManhattanLayout& gt) {
  return iou2d(rescale_to_camera_height(fit, 1.6).plan,
               rescale_to_camera_height(gt, 1.6).plan);
}

// Height of a layout expressed in the frame where cam_to_ceiling = 1.6.
double norm_height(const ManhattanLayout& l) {
  return 1.6 * l.height() / l.cam_to_ceiling;
}

Image rect_mask(int size, int x0, int y0, int x1, int y1) {
  Image m(size, size, 1, 0.f);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) m.at(x, y) = 1.f;
  return m;
}

}  // namespace

TEST_CASE("fusion is the fixed affine combination") {
  Image fp(4, 4, 1, 0.8f), mc(4, 4, 1, 0.6f), mf(4, 4, 1, 0.4f);
  const Image fused = fuse_floor_plan(fp, mc, mf);
  for (float v : fused.data) CHECK(v == doctest::Approx(0.65f));

  Image ones(4, 4, 1, 1.f);
  for (float v : fuse_floor_plan(ones, ones, ones).data)
    CHECK(v == doctest::Approx(1.0f));
  Image x(4, 4, 1, 0.37f);
  for (float v : fuse_floor_plan(x, x, x).data)
    CHECK(v == doctest::Approx(0.37f));
}

TEST_CASE("hemisphere views superimpose when the height gauge is met") {
  const int w = 512, h = 256;
  const PerspectiveConfig cfg{160.0, 256};
  for (double ctf : {1.6, 3.2}) {
    ManhattanLayout l;
    l.plan = {{-2, -1.5}, {2, -1.5}, {2, 2}, {-2, 2}};
    l.cam_to_ceiling = 1.6;
    l.cam_to_floor = ctf;  // H = 3.2 gives scale 1, H = 4.8 gives 0.5
    const CeilingMaps maps = synth_ceiling_maps(l, w, h, cfg, {});
    Image mc, mf;
    split_and_project_fc(maps.fc, l.height(), cfg, &mc, &mf);
    int inter = 0, uni = 0;
    for (size_t i = 0; i < mc.data.size(); ++i) {
      const bool a = mc.data[i] > 0.5f, b = mf.data[i] > 0.5f;
      inter += a && b;
      uni += a || b;
    }
    CHECK(double(inter) / uni > 0.97);
  }
}

TEST_CASE("degenerate heights are rejected") {
  Image fc(64, 32, 1, 1.f);
  Image mc, mf;
  CHECK_THROWS_AS(split_and_project_fc(fc, 1.6, {160.0, 32}, &mc, &mf),
                  DegenerateHeight);
  CHECK_THROWS_AS(extrude({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 1.599, {}),
                  DegenerateHeight);
}

TEST_CASE("region extraction keeps the largest component") {
  Image m = rect_mask(64, 10, 10, 29, 39);  // 20 x 30
  // Second, smaller blob.
  for (int y = 50; y < 60; ++y)
    for (int x = 40; x < 55; ++x) m.at(x, y) = 0.8f;
  const Region r = extract_region(m, 0.5);
  CHECK(r.x0 == 10);
  CHECK(r.y0 == 10);
  CHECK(r.x1 == 29);
  CHECK(r.y1 == 39);
  double area = 0;
  for (float v : r.mask.data) area += v;
  CHECK(area == doctest::Approx(20 * 30));

  const Image zero(32, 32, 1, 0.f);
  CHECK_THROWS_AS(extract_region(zero, 0.5), EmptyRegion);
}

TEST_CASE("boundary tracing and simplification find the true corners") {
  const Region rect = extract_region(rect_mask(64, 8, 12, 40, 30), 0.5);
  const std::vector<Vector2d> loop = trace_boundary(rect);
  CHECK(loop.size() > 50);
  const std::vector<Vector2d> poly = simplify_closed(loop, 1.0);
  CHECK(poly.size() == 4);

  // Simplification is idempotent.
  const std::vector<Vector2d> again = simplify_closed(poly, 1.0);
  REQUIRE(again.size() == poly.size());
  for (size_t i = 0; i < poly.size(); ++i)
    CHECK((again[i] - poly[i]).norm() < 1e-9);

  // L-shaped mask keeps its six corners.
  Image lmask = rect_mask(64, 10, 10, 49, 29);
  for (int y = 30; y < 50; ++y)
    for (int x = 10; x < 30; ++x) lmask.at(x, y) = 1.f;
  const Region lr = extract_region(lmask, 0.5);
  const std::vector<Vector2d> lpoly =
      simplify_closed(trace_boundary(lr), 2.0);
  CHECK(lpoly.size() == 6);
}

TEST_CASE("manhattan regularization and its failure mode") {
  const PerspectiveConfig cfg{160.0, 64};
  CeilingFitParams params;
  // Camera pixel is the view center; keep it inside the mask.
  const Region rect = extract_region(rect_mask(64, 20, 22, 45, 40), 0.5);
  const std::vector<Vector2d> poly =
      simplify_closed(trace_boundary(rect), params.dp_epsilon);
  const std::vector<Vector2d> reg =
      regularize_manhattan(poly, rect, cfg, params);
  REQUIRE(reg.size() == 4);
  for (const Vector2d& v : reg) {
    CHECK(v.x() >= 19.0);
    CHECK(v.x() <= 46.0);
    CHECK(v.y() >= 21.0);
    CHECK(v.y() <= 41.0);
  }

  // A diamond has no axis-aligned edges at all.
  Image diamond(64, 64, 1, 0.f);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (std::abs(x - 32) + std::abs(y - 32) <= 20) diamond.at(x, y) = 1.f;
  const Region dr = extract_region(diamond, 0.5);
  const std::vector<Vector2d> dpoly =
      simplify_closed(trace_boundary(dr), params.dp_epsilon);
  CHECK_THROWS_AS(regularize_manhattan(dpoly, dr, cfg, params),
                  NonRectilinear);
}

TEST_CASE("extrusion converts pixels to meters through the view scale") {
  const PerspectiveConfig cfg{160.0, 512};
  const double f = focal_px(cfg);
  const double c = 0.5 * (cfg.size - 1);
  const double half_px = 100.0;
  const std::vector<Vector2d> plan_px = {{c - half_px, c - half_px},
                                         {c - half_px, c + half_px},
                                         {c + half_px, c + half_px},
                                         {c + half_px, c - half_px}};
  const ManhattanLayout out = extrude(plan_px, 3.2, cfg);
  CHECK(out.cam_to_ceiling == doctest::Approx(1.6));
  CHECK(out.cam_to_floor == doctest::Approx(1.6));
  const double half_m = half_px * 1.6 / f;
  CHECK(plan_area(out.plan) == doctest::Approx(4 * half_m * half_m));

  // Twice the pixels, twice the meters.
  std::vector<Vector2d> big = plan_px;
  for (auto& p : big) p = Vector2d(c, c) + 2.0 * (p - Vector2d(c, c));
  const ManhattanLayout out2 = extrude(big, 3.2, cfg);
  CHECK(plan_area(out2.plan) ==
        doctest::Approx(4 * plan_area(out.plan)).epsilon(1e-9));
}

TEST_CASE("height from columns matches the normalized truth") {
  for (uint64_t seed : {11ull, 12ull, 13ull}) {
    const ManhattanLayout gt = sample_layout(seed, 6);
    const ColumnPrediction cols = synth_columns(gt, 1024, 512, {});
    CHECK(ceiling_height_from_columns(cols) ==
          doctest::Approx(norm_height(gt)).epsilon(0.005));
  }
}

TEST_CASE("full ceiling fit recovers clean rooms") {
  const PerspectiveConfig cfg{160.0, 512};
  for (int n : {4, 6, 8}) {
    const ManhattanLayout gt = sample_layout(900 + n, n);
    const CeilingMaps maps = synth_ceiling_maps(gt, 1024, 512, cfg, {});
    const ManhattanLayout fit =
        fit_ceiling(maps, norm_height(gt), cfg, {});
    CHECK(int(fit.plan.size()) == n);
    CHECK(iou_vs_gt(fit, gt) > 99.0);
  }
}

TEST_CASE("cuboid mode reduces any room to its bounding rectangle") {
  const PerspectiveConfig cfg{160.0, 512};
  const ManhattanLayout gt = sample_layout(905, 8);
  const CeilingMaps maps = synth_ceiling_maps(gt, 1024, 512, cfg, {});
  CeilingFitParams params;
  params.cuboid = true;
  const ManhattanLayout fit = fit_ceiling(maps, norm_height(gt), cfg, params);
  CHECK(fit.plan.size() == 4);
  // The bounding box contains the true plan.
  const ManhattanLayout a = rescale_to_camera_height(fit, 1.6);
  const ManhattanLayout b = rescale_to_camera_height(gt, 1.6);
  double bx0 = 1e9, bx1 = -1e9, bz0 = 1e9, bz1 = -1e9;
  for (const auto& p : a.plan) {
    bx0 = std::min(bx0, p.x());
    bx1 = std::max(bx1, p.x());
    bz0 = std::min(bz0, p.y());
    bz1 = std::max(bz1, p.y());
  }
  for (const auto& p : b.plan) {
    CHECK(p.x() >= bx0 - 0.1);
    CHECK(p.x() <= bx1 + 0.1);
    CHECK(p.y() >= bz0 - 0.1);
    CHECK(p.y() <= bz1 + 0.1);
  }
}
