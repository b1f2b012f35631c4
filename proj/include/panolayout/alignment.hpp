#pragma once

#include <vector>

#include "panolayout/geometry.hpp"

namespace panolayout {

// Great-circle arc on the viewing sphere; endpoints are unit vectors and
// never antipodal.
struct LineSegment {
  Vector3d a, b;
  int view = -1;  // source view id, -1 when loaded externally
};

// Right-handed orthonormal triad with y nearest world-up and z nearest
// world-forward.
struct ManhattanFrame {
  Vector3d x, y, z;

  // Columns map canonical axes into the frame.
  Matrix3d rotation() const;
};

struct AlignParams {
  int view_size = 256;
  double view_fov_deg = 90.0;
  double grad_threshold = 0.5;  // Sobel magnitude cut, unit-range images
  double min_length_px = 30.0;
  double max_rms_px = 1.5;      // straightness cut on the PCA residual
  double bin_deg = 2.0;         // accumulator cell size and voting band
  double ortho_tol_deg = 5.0;
  int min_votes = 3;
};

// Naive detector: 16 overlapping 90-degree views (8 around the horizon, 8
// tilted), Sobel edges, orientation-linked connected components fitted by
// PCA, components >= 30 px lifted to sphere arcs. Deterministic; an empty
// list on featureless input is not an error.
std::vector<LineSegment> detect_segments_naive(const Image& pano,
                                               const AlignParams& params = {});

// Hough vote over hemisphere-binned candidate directions: a segment votes
// for every cell near its great-circle normal's polar circle. The top cell
// and the best orthogonal pair are refined on their member normals and
// re-orthonormalized. Throws FrameNotFound without an orthogonal triple of
// min_votes cells.
ManhattanFrame vote_vanishing_directions(const std::vector<LineSegment>& segs,
                                         const AlignParams& params = {});

// rotate_panorama(pano, R^T) for R = frame.rotation(); wall-wall boundaries
// of a Manhattan room become vertical image lines.
Image align_panorama(const Image& pano, const ManhattanFrame& frame);

// 3-channel equirect map; each segment is drawn as a 1 px great-circle
// polyline into the channel of the axis that best explains it.
Image rasterize_line_map(const std::vector<LineSegment>& segs,
                         const ManhattanFrame& frame, int width = 1024,
                         int height = 512);

}  // namespace panolayout
