#include <cmath>
#include <random>

#include <doctest.h>

#include "panolayout/geometry.hpp"

using namespace panolayout;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("pixel center conversions invert exactly") {
  const int w = 1024, h = 512;
  for (double u : {0.0, 1.0, 511.5, 1023.0}) {
    CHECK(u_from_px(px_from_u(u, w), w) == doctest::Approx(u).epsilon(1e-12));
  }
  for (double v : {0.0, 255.5, 511.0}) {
    CHECK(v_from_py(py_from_v(v, h), h) == doctest::Approx(v).epsilon(1e-12));
  }
  // Pixel (0,0) sits half a pixel in from the corner of the [-1,1] square.
  CHECK(px_from_u(0, w) == doctest::Approx(-1.0 + 1.0 / w));
  CHECK(py_from_v(0, h) == doctest::Approx(1.0 - 1.0 / h));
}

TEST_CASE("sphere_to_equirect canonical directions") {
  Vector2d p = sphere_to_equirect({0, 0, 1});
  CHECK(p.x() == doctest::Approx(0.0));
  CHECK(p.y() == doctest::Approx(0.0));

  p = sphere_to_equirect({1, 0, 0});
  CHECK(p.x() == doctest::Approx(0.5));
  CHECK(p.y() == doctest::Approx(0.0));

  // Poles pin the azimuth to 0.
  p = sphere_to_equirect({0, 1, 0});
  CHECK(p.x() == doctest::Approx(0.0));
  CHECK(p.y() == doctest::Approx(1.0));
  p = sphere_to_equirect({0, -1, 0});
  CHECK(p.x() == doctest::Approx(0.0));
  CHECK(p.y() == doctest::Approx(-1.0));
}

TEST_CASE("equirect_to_sphere inverts away from poles") {
  CHECK((equirect_to_sphere({0, 0}) - Vector3d(0, 0, 1)).norm() < 1e-12);
  CHECK((equirect_to_sphere({0.5, 0}) - Vector3d(1, 0, 0)).norm() < 1e-12);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  std::uniform_real_distribution<double> uy(-0.99, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const Vector2d p(ux(rng), uy(rng));
    const Vector2d q = sphere_to_equirect(equirect_to_sphere(p));
    CHECK((q - p).cwiseAbs().maxCoeff() < 1e-9);
  }
  for (int i = 0; i < 1000; ++i) {
    Vector3d s(ux(rng), uy(rng), ux(rng));
    if (s.norm() < 1e-3) continue;
    s.normalize();
    if (std::abs(s.y()) > 0.999) continue;
    const Vector3d t = equirect_to_sphere(sphere_to_equirect(s));
    CHECK((t - s).norm() < 1e-9);
  }
}

TEST_CASE("focal length of the 160 degree 512 view") {
  CHECK(focal_px({160.0, 512}) == doctest::Approx(45.1397).epsilon(1e-4));
  CHECK(focal_px({90.0, 512}) == doctest::Approx(256.0));
}

TEST_CASE("view rays point at the right hemisphere") {
  const PerspectiveConfig cfg{160.0, 512};
  const double c = 0.5 * (cfg.size - 1);
  // Center pixel looks straight up (ceiling) or down (floor).
  Vector3d r = view_ray(cfg, true, {c, c}).normalized();
  CHECK(r.y() == doctest::Approx(1.0));
  r = view_ray(cfg, false, {c, c}).normalized();
  CHECK(r.y() == doctest::Approx(-1.0));

  // Ceiling view: +z is at the bottom of the view, +x to the right.
  r = view_ray(cfg, true, {c, c + 100});
  CHECK(r.z() > 0);
  r = view_ray(cfg, true, {c + 100, c});
  CHECK(r.x() > 0);
  // Floor view keeps +z at the top.
  r = view_ray(cfg, false, {c, c - 100});
  CHECK(r.z() > 0);
}

TEST_CASE("p2e center pixel hits the zenith row") {
  const PerspectiveConfig cfg{160.0, 512};
  const double c = 0.5 * (cfg.size - 1);
  const Vector2d p = p2e_lookup(cfg, true, {c, c});
  CHECK(p.y() == doctest::Approx(1.0));
  // Determinism.
  CHECK(p2e_lookup(cfg, true, {10.0, 20.0}) ==
        p2e_lookup(cfg, true, {10.0, 20.0}));
}

TEST_CASE("corner pixel polar angle matches the scalar oracle") {
  const PerspectiveConfig cfg{160.0, 512};
  const double f = focal_px(cfg);
  const Vector2d pix(0.0, 0.0);
  const double dx = pix.x() + 0.5 - 0.5 * cfg.size;
  const double dy = 0.5 * cfg.size - (pix.y() + 0.5);
  const double oracle = std::atan2(std::hypot(dx, dy), f);
  const Vector3d r = view_ray(cfg, true, pix).normalized();
  const double polar = std::acos(r.y());  // angle from the zenith
  CHECK(polar == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("e2p of a constant panorama is constant") {
  Image pano(64, 32, 1, 0.375f);
  const Image view = e2p_project(pano, {160.0, 32}, true);
  for (float v : view.data) CHECK(v == doctest::Approx(0.375f));
}

TEST_CASE("plan and view pixel maps invert") {
  const PerspectiveConfig cfg{160.0, 512};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const Vector2d xz(u(rng), u(rng));
    const double h = 1.0 + 0.1 * i;
    const Vector2d back = view_px_to_plan(cfg, plan_to_view_px(cfg, xz, h), h);
    CHECK((back - xz).norm() < 1e-9);
  }
  // 1 view pixel spans h / f meters on the plane.
  const double f = focal_px(cfg);
  const Vector2d a = view_px_to_plan(cfg, {100.0, 200.0}, 1.6);
  const Vector2d b = view_px_to_plan(cfg, {101.0, 200.0}, 1.6);
  CHECK((b - a).norm() == doctest::Approx(1.6 / f));
}

TEST_CASE("rotate_panorama identity and whole column yaws are exact") {
  const int w = 64, h = 32;
  Image pano(w, h, 1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(0.f, 1.f);
  for (float& v : pano.data) v = u(rng);

  const Image same = rotate_panorama(pano, Matrix3d::Identity());
  CHECK(same.data == pano.data);

  const int k = 7;
  const Image shifted = rotate_panorama(pano, rot_y(2.0 * kPi * k / w));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      CHECK(shifted.at((x + k) % w, y) == pano.at(x, y));
}

TEST_CASE("rotate then unrotate restores a smooth panorama") {
  const int w = 256, h = 128;
  Image pano(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      pano.at(x, y) = 0.5f + 0.25f * std::sin(2.0 * kPi * x / w) +
                      0.2f * std::cos(kPi * y / h);
  const Matrix3d R = rot_y(0.31) * rot_x(0.12);
  const Image back = rotate_panorama(rotate_panorama(pano, R),
                                     Matrix3d(R.transpose()));
  CHECK(psnr(back, pano) > 40.0);
}

TEST_CASE("rotation helpers are orthonormal") {
  for (double a : {0.1, 1.0, 2.5}) {
    for (const Matrix3d& R : {rot_x(a), rot_y(a)}) {
      CHECK((R * R.transpose() - Matrix3d::Identity()).norm() < 1e-12);
      CHECK(R.determinant() == doctest::Approx(1.0));
    }
  }
}
