#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "panolayout/augment.hpp"
#include "panolayout/metrics.hpp"
#include "panolayout/predict_stub.hpp"

using namespace panolayout;

namespace {
constexpr double kPi = 3.14159265358979323846;

Image noise_pano(int w, int h, int c, uint64_t seed) {
  Image img(w, h, c);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.f, 1.f);
  for (float& v : img.data) v = u(rng);
  return img;
}

// Every lit pixel of a has a lit pixel of b within a 1 px chebyshev window.
bool curves_close(const Image& a, const Image& b, float on_a, float near_b) {
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x)
      for (int c = 0; c < a.channels; ++c) {
        if (a.at(x, y, c) < on_a) continue;
        float best = 0.f;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int yy = std::clamp(y + dy, 0, a.height - 1);
            const int xx = (x + dx + a.width) % a.width;
            best = std::max(best, b.at(xx, yy, c));
          }
        if (best < near_b) return false;
      }
  return true;
}

}  // namespace

TEST_CASE("unit stretch is the identity") {
  const ManhattanLayout l = sample_layout(5, 6);
  const Image pano = noise_pano(128, 64, 3, 1);
  const Augmented out = apply_stretch(pano, l, 1.0, 1.0);
  for (size_t i = 0; i < pano.data.size(); ++i)
    CHECK(out.pano.data[i] == doctest::Approx(pano.data[i]).epsilon(1e-6));
  for (size_t i = 0; i < l.plan.size(); ++i)
    CHECK((out.layout.plan[i] - l.plan[i]).norm() < 1e-12);
}

TEST_CASE("stretch maps plan corners exactly") {
  ManhattanLayout l;
  l.plan = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  l.cam_to_floor = 1.6;
  l.cam_to_ceiling = 1.4;
  const Image pano = noise_pano(64, 32, 1, 2);
  const Augmented out = apply_stretch(pano, l, 1.0, 2.0);
  CHECK(out.layout.plan[2].x() == doctest::Approx(1.0));
  CHECK(out.layout.plan[2].y() == doctest::Approx(2.0));
  CHECK(out.layout.cam_to_floor == doctest::Approx(1.6));
  CHECK(out.layout.height() == doctest::Approx(3.0));
}

TEST_CASE("stretching commutes with boundary rendering") {
  const int w = 512, h = 256;
  const ManhattanLayout l = sample_layout(11, 6);
  const Image rendered = render_boundary_map(l, w, h, false);

  const double kx = 1.4, kz = 0.8;
  const Augmented st = apply_stretch(rendered, l, kx, kz);
  const Image direct = render_boundary_map(st.layout, w, h, false);

  CHECK(curves_close(direct, st.pano, 0.5f, 0.15f));
  CHECK(curves_close(st.pano, direct, 0.5f, 0.5f));
}

TEST_CASE("whole-image rotations are exact and invertible") {
  const ManhattanLayout l = sample_layout(21, 4);
  const Image pano = noise_pano(256, 128, 3, 3);

  const Augmented zero = pano_rotate(pano, l, 0);
  CHECK(zero.pano.data == pano.data);
  const Augmented full = pano_rotate(pano, l, 256);
  CHECK(full.pano.data == pano.data);
  for (size_t i = 0; i < l.plan.size(); ++i)
    CHECK((full.layout.plan[i] - l.plan[i]).norm() < 1e-9);

  const int k = 37;
  const Augmented rot = pano_rotate(pano, l, k);
  for (int y = 0; y < pano.height; ++y)
    for (int x = 0; x < pano.width; ++x)
      for (int c = 0; c < 3; ++c)
        CHECK(rot.pano.at((x + k) % pano.width, y, c) == pano.at(x, y, c));

  // The plan turns by the matching yaw.
  const double yaw = 2.0 * kPi * k / pano.width;
  const double ca = std::cos(yaw), sa = std::sin(yaw);
  for (size_t i = 0; i < l.plan.size(); ++i) {
    const Vector2d& p = l.plan[i];
    const Vector2d want(ca * p.x() + sa * p.y(), -sa * p.x() + ca * p.y());
    bool found = false;
    for (const Vector2d& q : rot.layout.plan)
      found = found || (q - want).norm() < 1e-6;
    CHECK(found);
  }
}

TEST_CASE("quarter-turn rotation preserves the metric suite") {
  const int w = 256;
  const ManhattanLayout gt = sample_layout(31, 6);
  ManhattanLayout pred = gt;
  for (auto& p : pred.plan) p *= 1.05;  // a slightly wrong prediction
  const Image pano = noise_pano(w, w / 2, 1, 4);

  const double before = iou2d(pred.plan, gt.plan);
  const Augmented rg = pano_rotate(pano, gt, w / 4);
  const Augmented rp = pano_rotate(pano, pred, w / 4);
  CHECK(iou2d(rp.layout.plan, rg.layout.plan) ==
        doctest::Approx(before).epsilon(1e-9));
}

TEST_CASE("flip is an involution and commutes with rendering") {
  const int w = 512, h = 256;
  const ManhattanLayout l = sample_layout(41, 8);
  const Image pano = render_boundary_map(l, w, h, false);

  const Augmented f1 = pano_flip(pano, l);
  CHECK(f1.layout.plan.size() == l.plan.size());
  CHECK(layout_is_valid(f1.layout));
  const Augmented f2 = pano_flip(f1.pano, f1.layout);
  CHECK(f2.pano.data == pano.data);
  CHECK(iou2d(f2.layout.plan, l.plan) == doctest::Approx(100.0));

  // Rendering the mirrored layout equals mirroring the rendered map.
  const Image direct = render_boundary_map(f1.layout, w, h, false);
  CHECK(direct.data == f1.pano.data);
}

TEST_CASE("luminance is a clamped per-pixel power law") {
  const Image pano = noise_pano(64, 32, 3, 5);
  const Image same = luminance(pano, 1.0);
  for (size_t i = 0; i < pano.data.size(); ++i)
    CHECK(same.data[i] == doctest::Approx(pano.data[i]).epsilon(1e-6));

  const Image dark = luminance(pano, 2.2);
  for (size_t i = 0; i < pano.data.size(); ++i) {
    CHECK(dark.data[i] >= 0.f);
    CHECK(dark.data[i] <= 1.f);
    CHECK(dark.data[i] ==
          doctest::Approx(std::pow(pano.data[i], 2.2f)).epsilon(1e-4));
    CHECK(dark.data[i] <= pano.data[i] + 1e-6f);
  }
}

TEST_CASE("random stretch reports the factors it applied") {
  const ManhattanLayout l = sample_layout(51, 4);
  const Image pano = noise_pano(64, 32, 1, 6);
  double kx = 0.0, kz = 0.0;
  const Augmented a = random_stretch(pano, l, 1.5, 2.0, 99, &kx, &kz);
  CHECK(kx >= 1.0 / 1.5);
  CHECK(kx <= 1.5);
  CHECK(kz >= 0.5);
  CHECK(kz <= 2.0);
  for (size_t i = 0; i < l.plan.size(); ++i) {
    CHECK(a.layout.plan[i].x() == doctest::Approx(kx * l.plan[i].x()));
    CHECK(a.layout.plan[i].y() == doctest::Approx(kz * l.plan[i].y()));
  }
  // Deterministic per seed.
  double kx2 = 0.0, kz2 = 0.0;
  random_stretch(pano, l, 1.5, 2.0, 99, &kx2, &kz2);
  CHECK(kx == kx2);
  CHECK(kz == kz2);
}
