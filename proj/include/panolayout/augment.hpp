#pragma once

#include <cstdint>
#include <utility>

#include "panolayout/layout.hpp"

namespace panolayout {

struct Augmented {
  Image pano;
  ManhattanLayout layout;
};

// Axis stretch: plan corners map exactly by (x, z) -> (kx * x, kz * z),
// heights unchanged; the panorama is resampled so scene content follows,
// out(s) = in(normalize(s_x / kx, s_y, s_z / kz)).
Augmented apply_stretch(const Image& pano, const ManhattanLayout& layout,
                        double kx, double kz);

// Log-uniform factors in [1/kx_max, kx_max] x [1/kz_max, kz_max], then
// apply_stretch. The drawn factors are reported through *kx / *kz.
Augmented random_stretch(const Image& pano, const ManhattanLayout& layout,
                         double kx_max, double kz_max, uint64_t seed,
                         double* kx = nullptr, double* kz = nullptr);

// Exact circular shift by k columns (content at column c moves to c + k)
// with the plan yawed to match. Lossless for any integer k.
Augmented pano_rotate(const Image& pano, const ManhattanLayout& layout,
                      int columns);

// Mirror columns; plan mirrored x -> -x and rewound to stay CCW.
Augmented pano_flip(const Image& pano, const ManhattanLayout& layout);

// Per-channel power law v -> v^gamma, output clamped to [0, 1].
Image luminance(const Image& pano, double gamma);

}  // namespace panolayout
