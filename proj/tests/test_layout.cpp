#include <cmath>
#include <random>

#include <doctest.h>

#include "panolayout/errors.hpp"
#include "panolayout/layout.hpp"

using namespace panolayout;

namespace {

ManhattanLayout square_room(double half = 2.0, double ctf = 1.6,
                            double ctc = 1.6) {
  ManhattanLayout l;
  l.plan = {{-half, -half}, {half, -half}, {half, half}, {-half, half}};
  l.cam_to_floor = ctf;
  l.cam_to_ceiling = ctc;
  return l;
}

// 6-corner L around the origin.
ManhattanLayout l_room() {
  ManhattanLayout l;
  l.plan = {{-2, -2}, {3, -2}, {3, 1}, {1, 1}, {1, 3}, {-2, 3}};
  l.cam_to_floor = 1.6;
  l.cam_to_ceiling = 1.4;
  return l;
}

}  // namespace

TEST_CASE("layout validation accepts good rooms and rejects bad ones") {
  CHECK(layout_is_valid(square_room()));
  CHECK(layout_is_valid(l_room()));

  ManhattanLayout odd = square_room();
  odd.plan.push_back({0.0, -2.0});
  CHECK_FALSE(layout_is_valid(odd));

  ManhattanLayout outside = square_room();
  for (auto& p : outside.plan) p += Vector2d(5.0, 0.0);
  CHECK_FALSE(layout_is_valid(outside));

  ManhattanLayout cw = square_room();
  std::reverse(cw.plan.begin(), cw.plan.end());
  CHECK_FALSE(layout_is_valid(cw));

  ManhattanLayout diag = square_room();
  diag.plan[1] = {2.0, -1.5};  // edge no longer axis-parallel
  CHECK_FALSE(layout_is_valid(diag));

  ManhattanLayout flat = square_room();
  flat.cam_to_floor = 0.0;
  CHECK_FALSE(layout_is_valid(flat));
  CHECK_THROWS_AS(validate_layout(flat), InfeasibleLayout);
}

TEST_CASE("plan area and point membership") {
  const ManhattanLayout sq = square_room(2.0);
  CHECK(plan_area(sq.plan) == doctest::Approx(16.0));
  CHECK(plan_area(l_room().plan) == doctest::Approx(5 * 5 - 2 * 2));
  CHECK(point_in_plan(sq.plan, {0, 0}));
  CHECK(point_in_plan(sq.plan, {1.9, -1.9}));
  CHECK_FALSE(point_in_plan(sq.plan, {2.1, 0}));
  CHECK_FALSE(point_in_plan(l_room().plan, {2.0, 2.0}));  // notch
}

TEST_CASE("raycast hits the expected wall at the expected range") {
  const ManhattanLayout sq = square_room(2.0);
  int wall = -1;
  CHECK(raycast_plan(sq.plan, 0.0, &wall) == doctest::Approx(2.0));
  CHECK(raycast_plan(sq.plan, 0.5 * 3.14159265358979, &wall) ==
        doctest::Approx(2.0));
  // Diagonal toward a corner.
  CHECK(raycast_plan(sq.plan, 0.25 * 3.14159265358979, nullptr) ==
        doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("projected corners pair up in columns around the horizon") {
  const int w = 1024, h = 512;
  const ManhattanLayout sq = square_room(2.0, 1.6, 1.6);
  const CornerSet2D cs = project_corners(sq, w, h);
  REQUIRE(cs.pairs.size() == 4);
  for (const CornerPair& p : cs.pairs) {
    CHECK(p.ceil_uv.x() == doctest::Approx(p.floor_uv.x()).epsilon(1e-9));
    CHECK(p.ceil_uv.y() < p.floor_uv.y());
    // Camera at mid-height: pairs are symmetric about the horizon row.
    CHECK(p.ceil_uv.y() + p.floor_uv.y() == doctest::Approx(h - 1.0));
  }

  // A point on the forward axis lands on the theta = 0 column.
  const Vector2d uv = sphere_to_equirect(Vector3d(0, 1.6, 2).normalized());
  CHECK(u_from_px(uv.x(), w) == doctest::Approx(w / 2.0 - 0.5));
}

TEST_CASE("point profile map is a unit-peak distance profile") {
  const int w = 64, h = 32;
  const double sigma = 3.0;
  std::vector<Vector2d> pts = {{10.0, 12.0}};
  const Image m = point_profile_map(pts, w, h, sigma);
  CHECK(m.at(10, 12) == doctest::Approx(1.0));
  for (int d : {1, 2, 5, 9}) {
    const double want = std::exp(-0.5 * d * d / (sigma * sigma));
    CHECK(m.at(10, 12 + d) == doctest::Approx(want).epsilon(1e-5));
    CHECK(m.at(10 + d, 12) == doctest::Approx(want).epsilon(1e-5));
  }
  // Diagonal distance.
  const double want = std::exp(-0.5 * (9.0 + 16.0) / (sigma * sigma));
  CHECK(m.at(13, 16) == doctest::Approx(want).epsilon(1e-5));
}

TEST_CASE("point profile map wraps horizontally and handles empty sets") {
  const int w = 64, h = 32;
  const Image empty = point_profile_map({}, w, h, 3.0);
  for (float v : empty.data) CHECK(v == 0.f);

  std::vector<Vector2d> pts = {{0.0, 16.0}};
  const Image m = point_profile_map(pts, w, h, 3.0);
  const double want1 = std::exp(-0.5 / 9.0);
  CHECK(m.at(w - 1, 16) == doctest::Approx(want1).epsilon(1e-5));
  CHECK(m.at(1, 16) == doctest::Approx(want1).epsilon(1e-5));
}

TEST_CASE("subpixel seeds keep exact y and snapped x") {
  const int w = 64, h = 64;
  std::vector<Vector2d> pts = {{20.0, 30.25}};
  const Image m = point_profile_map(pts, w, h, 2.0);
  const double want = std::exp(-0.5 * (0.75 * 0.75) / 4.0);
  CHECK(m.at(20, 31) == doctest::Approx(want).epsilon(1e-5));
  CHECK(m.at(20, 30) == doctest::Approx(std::exp(-0.5 * 0.0625 / 4.0))
                            .epsilon(1e-5));
}

TEST_CASE("unsmoothed boundary map is binary with four wall lines") {
  const int w = 512, h = 256;
  const Image m = render_boundary_map(square_room(), w, h, false);
  REQUIRE(m.channels == 3);
  int wall_cols = 0;
  for (int x = 0; x < w; ++x) {
    bool any = false;
    for (int y = 0; y < h; ++y) {
      for (int c = 0; c < 3; ++c) {
        const float v = m.at(x, y, c);
        CHECK((v == 0.f || v == 1.f));
      }
      any = any || m.at(x, y, 0) > 0.f;
    }
    wall_cols += any;
  }
  // 4 vertical wall-wall lines, each 1 px wide.
  CHECK(wall_cols == 4);
}

TEST_CASE("smoothed maps peak at 1 on the curves") {
  const int w = 512, h = 256;
  const Image m = render_boundary_map(square_room(), w, h, true);
  for (int c = 0; c < 3; ++c) {
    float mx = 0.f;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) mx = std::max(mx, m.at(x, y, c));
    CHECK(mx == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("corner map peaks sit on the projected corners") {
  const int w = 1024, h = 512;
  const ManhattanLayout sq = square_room();
  const CornerSet2D cs = project_corners(sq, w, h);
  const Image m = render_corner_map(sq, w, h, true);
  for (const CornerPair& p : cs.pairs) {
    for (const Vector2d& uv : {p.ceil_uv, p.floor_uv}) {
      const int x = static_cast<int>(std::lround(uv.x()));
      const int y = static_cast<int>(std::lround(uv.y()));
      // Within half a pixel of a unit peak.
      CHECK(m.at(x, y) > std::exp(-0.5 * 0.5 / 400.0) - 1e-4);
    }
  }
  // Unsmoothed: exactly 8 lit pixels.
  const Image bin = render_corner_map(sq, w, h, false);
  int lit = 0;
  for (float v : bin.data) lit += v > 0.f;
  CHECK(lit == 8);
}

TEST_CASE("semantics classify zenith nadir and horizon correctly") {
  const int w = 256, h = 128;
  const Image sem = render_semantics(l_room(), w, h);
  for (int x = 0; x < w; x += 17) {
    CHECK(sem.at(x, 0) == float(kCeiling));
    CHECK(sem.at(x, h - 1) == float(kFloor));
    CHECK(sem.at(x, h / 2) == float(kWall));
    CHECK(sem.at(x, h / 2 - 1) == float(kWall));
  }
}

TEST_CASE("depth matches analytic ranges and agrees with semantics") {
  const int w = 256, h = 128;
  const ManhattanLayout sq = square_room(2.0, 1.6, 1.3);
  const DepthMap d = render_depth(sq, w, h);
  const Image sem = render_semantics(sq, w, h);
  REQUIRE(d.depth.size() == size_t(w) * h);

  // Bottom row center is within a fraction of a degree of the nadir.
  CHECK(d.depth[size_t(h - 1) * w + w / 2] ==
        doctest::Approx(1.6).epsilon(2e-3));
  // Horizon pixel facing the +z wall 2 m away.
  CHECK(d.depth[size_t(h / 2) * w + w / 2] == doctest::Approx(2.0).epsilon(2e-3));

  for (int y = 0; y < h; y += 7)
    for (int x = 0; x < w; x += 11) {
      CHECK(d.valid[size_t(y) * w + x] == 1);
      const Vector3d s =
          equirect_to_sphere({px_from_u(x, w), py_from_v(y, h)});
      const double hit_y = d.depth[size_t(y) * w + x] * s.y();
      const int cls = static_cast<int>(sem.at(x, y));
      if (cls == kCeiling) CHECK(hit_y == doctest::Approx(1.3).epsilon(1e-4));
      if (cls == kFloor) CHECK(hit_y == doctest::Approx(-1.6).epsilon(1e-4));
      if (cls == kWall) {
        CHECK(hit_y < 1.3 + 1e-6);
        CHECK(hit_y > -1.6 - 1e-6);
      }
    }
}

TEST_CASE("depth scales linearly with the layout") {
  const int w = 64, h = 32;
  const ManhattanLayout a = square_room(2.0, 1.6, 1.2);
  ManhattanLayout b = a;
  for (auto& p : b.plan) p *= 2.0;
  b.cam_to_floor *= 2.0;
  b.cam_to_ceiling *= 2.0;
  const DepthMap da = render_depth(a, w, h), db = render_depth(b, w, h);
  for (size_t i = 0; i < da.depth.size(); ++i)
    CHECK(db.depth[i] == doctest::Approx(2.0 * da.depth[i]).epsilon(1e-5));
}

TEST_CASE("rescale to camera height") {
  const ManhattanLayout l = square_room(2.0, 0.8, 1.0);
  const ManhattanLayout r = rescale_to_camera_height(l, 1.6);
  CHECK(r.cam_to_floor == doctest::Approx(1.6));
  CHECK(r.cam_to_ceiling == doctest::Approx(2.0));
  CHECK(r.plan[0].x() == doctest::Approx(-4.0));
  const ManhattanLayout same = rescale_to_camera_height(square_room(), 1.6);
  CHECK(same.plan[2].x() == doctest::Approx(2.0));
}

TEST_CASE("floor plan raster matches analytic area and flags clipping") {
  const PerspectiveConfig cfg{160.0, 512};
  const ManhattanLayout sq = square_room(2.0, 1.6, 1.6);
  const FloorPlanRender fp = render_floor_plan(sq, cfg);
  CHECK_FALSE(fp.clipped);
  double area_px = 0;
  for (float v : fp.map.data) area_px += v;
  const double ppm = focal_px(cfg) / sq.cam_to_ceiling;
  // Pixel-center rasterization is exact up to a half-pixel boundary band.
  CHECK(std::abs(area_px - 16.0 * ppm * ppm) <= 0.5 * 16.0 * ppm + 4.0);

  ManhattanLayout huge = square_room(20.0, 1.6, 1.6);
  CHECK(render_floor_plan(huge, cfg).clipped);
}

TEST_CASE("wall curves are densely sampled and straddle the seam") {
  const int w = 1024, h = 512;
  const ManhattanLayout sq = square_room();
  std::vector<Vector2d> uv;
  sample_wall_curve(sq, 0, true, w, h, 0.5, uv);
  REQUIRE(uv.size() > 10);
  for (size_t i = 1; i < uv.size(); ++i) {
    double du = std::abs(uv[i].x() - uv[i - 1].x());
    du = std::min(du, w - du);  // seam-aware
    const double dv = uv[i].y() - uv[i - 1].y();
    CHECK(std::hypot(du, dv) <= 0.5 + 1e-9);
  }
}
