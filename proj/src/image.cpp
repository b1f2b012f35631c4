#include "panolayout/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace panolayout {

namespace {

inline int wrap_i(int x, int w) {
  x %= w;
  return x < 0 ? x + w : x;
}

inline int clamp_i(int x, int n) { return x < 0 ? 0 : (x >= n ? n - 1 : x); }

float bilinear(const Image& img, double x, double y, int c, bool wrap_x) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  int xa, xb;
  if (wrap_x) {
    xa = wrap_i(x0, img.width);
    xb = wrap_i(x0 + 1, img.width);
  } else {
    xa = clamp_i(x0, img.width);
    xb = clamp_i(x0 + 1, img.width);
  }
  const int ya = clamp_i(y0, img.height);
  const int yb = clamp_i(y0 + 1, img.height);
  const double v00 = img.at(xa, ya, c), v10 = img.at(xb, ya, c);
  const double v01 = img.at(xa, yb, c), v11 = img.at(xb, yb, c);
  return static_cast<float>((v00 * (1 - fx) + v10 * fx) * (1 - fy) +
                            (v01 * (1 - fx) + v11 * fx) * fy);
}

inline double catmull_rom(double p0, double p1, double p2, double p3,
                          double t) {
  return 0.5 * (2.0 * p1 + t * (p2 - p0 +
                                t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                     t * (3.0 * (p1 - p2) + p3 - p0))));
}

}  // namespace

float sample_wrap(const Image& img, double x, double y, int c) {
  return bilinear(img, x, y, c, true);
}

float sample_wrap_cubic(const Image& img, double x, double y, int c) {
  const int x1 = static_cast<int>(std::floor(x));
  const int y1 = static_cast<int>(std::floor(y));
  const double fx = x - x1;
  const double fy = y - y1;
  double rows[4];
  for (int j = 0; j < 4; ++j) {
    const int yy = clamp_i(y1 - 1 + j, img.height);
    double p[4];
    for (int i = 0; i < 4; ++i)
      p[i] = img.at(wrap_i(x1 - 1 + i, img.width), yy, c);
    rows[j] = catmull_rom(p[0], p[1], p[2], p[3], fx);
  }
  return static_cast<float>(catmull_rom(rows[0], rows[1], rows[2], rows[3], fy));
}

float sample_clamp(const Image& img, double x, double y, int c) {
  return bilinear(img, x, y, c, false);
}

Image dilate3(const Image& img) {
  Image out(img.width, img.height, img.channels, 0.f);
  for (int y = 0; y < img.height; ++y) {
    const int ylo = std::max(0, y - 1), yhi = std::min(img.height - 1, y + 1);
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        float m = 0.f;
        for (int yy = ylo; yy <= yhi; ++yy)
          for (int dx = -1; dx <= 1; ++dx)
            m = std::max(m, img.at(wrap_i(x + dx, img.width), yy, c));
        out.at(x, y, c) = m;
      }
    }
  }
  return out;
}

namespace {

// Scatter-based 1-D pass along rows of a WxH double plane; skips zero inputs,
// so sparse maps (boundary curves) blur in time proportional to the support.
void blur_rows(const std::vector<double>& in, std::vector<double>& out, int w,
               int h, const std::vector<double>& k, bool wrap) {
  const int r = static_cast<int>(k.size()) / 2;
  std::fill(out.begin(), out.end(), 0.0);
  for (int y = 0; y < h; ++y) {
    const double* src = in.data() + static_cast<size_t>(y) * w;
    double* dst = out.data() + static_cast<size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const double v = src[x];
      if (v == 0.0) continue;
      if (wrap) {
        for (int t = -r; t <= r; ++t) dst[wrap_i(x + t, w)] += v * k[t + r];
      } else {
        const int lo = std::max(0, x - r), hi = std::min(w - 1, x + r);
        for (int t = lo; t <= hi; ++t) dst[t] += v * k[t - x + r];
      }
    }
  }
}

void transpose(const std::vector<double>& in, std::vector<double>& out, int w,
               int h) {
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out[static_cast<size_t>(x) * h + y] = in[static_cast<size_t>(y) * w + x];
}

}  // namespace

Image gaussian_blur(const Image& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int t = -r; t <= r; ++t) {
    k[t + r] = std::exp(-0.5 * t * t / (sigma * sigma));
    sum += k[t + r];
  }
  for (double& v : k) v /= sum;

  const int w = img.width, h = img.height;
  Image out(w, h, img.channels, 0.f);
  std::vector<double> plane(static_cast<size_t>(w) * h);
  std::vector<double> tmp(plane.size()), tmp2(plane.size());
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        plane[static_cast<size_t>(y) * w + x] = img.at(x, y, c);
    blur_rows(plane, tmp, w, h, k, true);
    transpose(tmp, tmp2, w, h);
    blur_rows(tmp2, tmp, h, w, k, false);
    transpose(tmp, tmp2, h, w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        out.at(x, y, c) = static_cast<float>(tmp2[static_cast<size_t>(y) * w + x]);
  }
  return out;
}

void renormalize_peaks(Image& img, double eps) {
  for (int c = 0; c < img.channels; ++c) {
    float m = 0.f;
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) m = std::max(m, img.at(x, y, c));
    if (m > eps) {
      const float s = 1.f / m;
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) img.at(x, y, c) *= s;
    }
  }
}

Image scale_about_center(const Image& img, double s) {
  Image out(img.width, img.height, img.channels, 0.f);
  const double cx = 0.5 * (img.width - 1), cy = 0.5 * (img.height - 1);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const double sx = cx + s * (x - cx);
      const double sy = cy + s * (y - cy);
      for (int c = 0; c < img.channels; ++c)
        out.at(x, y, c) = sample_clamp(img, sx, sy, c);
    }
  return out;
}

Image flip_vertical(const Image& img) {
  Image out(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c)
        out.at(x, y, c) = img.at(x, img.height - 1 - y, c);
  return out;
}

double psnr(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("psnr: shape mismatch");
  double mse = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.data.size());
  if (mse <= 0.0) return 1e9;
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace panolayout
