#include "panolayout/augment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace panolayout {

static constexpr double kPi = 3.14159265358979323846;

Augmented apply_stretch(const Image& pano, const ManhattanLayout& layout,
                        double kx, double kz) {
  Augmented out;
  out.pano = Image(pano.width, pano.height, pano.channels);
  for (int y = 0; y < pano.height; ++y)
    for (int x = 0; x < pano.width; ++x) {
      const Vector3d s = equirect_to_sphere(
          {px_from_u(x, pano.width), py_from_v(y, pano.height)});
      const Vector3d t = Vector3d(s.x() / kx, s.y(), s.z() / kz).normalized();
      const Vector2d p = sphere_to_equirect(t);
      const double su = u_from_px(p.x(), pano.width);
      const double sv = v_from_py(p.y(), pano.height);
      for (int c = 0; c < pano.channels; ++c)
        out.pano.at(x, y, c) = sample_wrap(pano, su, sv, c);
    }

  out.layout = layout;
  for (Vector2d& v : out.layout.plan) {
    v.x() *= kx;
    v.y() *= kz;
  }
  return out;
}

Augmented random_stretch(const Image& pano, const ManhattanLayout& layout,
                         double kx_max, double kz_max, uint64_t seed,
                         double* kx_out, double* kz_out) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double kx = std::exp((2.0 * unit(rng) - 1.0) * std::log(kx_max));
  const double kz = std::exp((2.0 * unit(rng) - 1.0) * std::log(kz_max));
  if (kx_out) *kx_out = kx;
  if (kz_out) *kz_out = kz;
  return apply_stretch(pano, layout, kx, kz);
}

Augmented pano_rotate(const Image& pano, const ManhattanLayout& layout,
                      int columns) {
  const int w = pano.width;
  const int k = ((columns % w) + w) % w;
  Augmented out;
  out.pano = Image(w, pano.height, pano.channels);
  for (int y = 0; y < pano.height; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < pano.channels; ++c)
        out.pano.at(x, y, c) = pano.at((x - k + w) % w, y, c);

  const double yaw = 2.0 * kPi * k / w;
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  out.layout = layout;
  for (Vector2d& v : out.layout.plan)
    v = Vector2d(v.x() * cy + v.y() * sy, -v.x() * sy + v.y() * cy);
  return out;
}

Augmented pano_flip(const Image& pano, const ManhattanLayout& layout) {
  Augmented out;
  out.pano = Image(pano.width, pano.height, pano.channels);
  for (int y = 0; y < pano.height; ++y)
    for (int x = 0; x < pano.width; ++x)
      for (int c = 0; c < pano.channels; ++c)
        out.pano.at(x, y, c) = pano.at(pano.width - 1 - x, y, c);

  out.layout = layout;
  for (Vector2d& v : out.layout.plan) v.x() = -v.x();
  std::reverse(out.layout.plan.begin(), out.layout.plan.end());
  return out;
}

Image luminance(const Image& pano, double gamma) {
  Image out = pano;
  for (float& v : out.data)
    v = static_cast<float>(
        std::pow(std::clamp(double(v), 0.0, 1.0), gamma));
  return out;
}

}  // namespace panolayout
