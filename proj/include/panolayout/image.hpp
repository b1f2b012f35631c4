#pragma once

#include <cstdint>
#include <vector>

namespace panolayout {

// Dense float image, row-major, channel-interleaved. Values mean whatever the
// producer says: probabilities in [0,1] for maps, meters for depth, class ids
// for semantic masks.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c, float fill = 0.f)
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, fill) {}

  float& at(int x, int y, int c = 0) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  float at(int x, int y, int c = 0) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

// Bilinear sample at real pixel coordinates (integer coords hit pixel
// centers). x wraps around the equirect seam, y clamps.
float sample_wrap(const Image& img, double x, double y, int c = 0);
// Bilinear with both axes clamped (perspective views).
float sample_clamp(const Image& img, double x, double y, int c = 0);
// Catmull-Rom bicubic, x wrapped, y clamped. Unlike bilinear its maximum
// tracks a sub-pixel peak instead of snapping to the nearest pixel center;
// can overshoot [0, 1] slightly near sharp peaks.
float sample_wrap_cubic(const Image& img, double x, double y, int c = 0);

// 3x3 max filter; x wraps, y truncates.
Image dilate3(const Image& img);

// Separable Gaussian, kernel truncated at 3 sigma; x wraps, y truncates
// (mass near the top/bottom rows falls off the image). Exact FIR, double
// accumulation, with a sparse fast path for mostly-zero inputs.
Image gaussian_blur(const Image& img, double sigma);

// Per channel: scale so the max becomes 1. Channels with max below eps are
// left untouched.
void renormalize_peaks(Image& img, double eps = 1e-12);

// out(p) = in(center + s * (p - center)), bilinear, clamped. s < 1 magnifies
// content, s > 1 shrinks it.
Image scale_about_center(const Image& img, double s);

Image flip_vertical(const Image& img);

// Peak signal-to-noise ratio assuming a [0,1] value range.
double psnr(const Image& a, const Image& b);

}  // namespace panolayout
