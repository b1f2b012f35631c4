#pragma once

#include <array>
#include <optional>
#include <string>

#include "panolayout/layout.hpp"
#include "panolayout/predict_stub.hpp"

namespace panolayout {

// Corner error: mean L2 pixel distance between cyclically matched corner
// pairs (best cyclic shift, seam-aware u distance), as a percentage of the
// image diagonal. Throws CountMismatch on unequal cardinality.
double corner_error(const CornerSet2D& pred, const CornerSet2D& gt, int width,
                    int height);

// Percentage of pixels whose semantic class differs.
double pixel_error(const ManhattanLayout& pred, const ManhattanLayout& gt,
                   int width, int height);

// Exact 2D IoU of two rectilinear plans (percent), via the grid decomposition
// induced by the union of both polygons' coordinates.
double iou2d(const std::vector<Vector2d>& a, const std::vector<Vector2d>& b);

// 3D IoU (percent). Both layouts are first rescaled to cam_to_floor = 1.6;
// intersection = plan intersection area x overlap of the two vertical
// intervals; union by inclusion-exclusion.
double iou3d(const ManhattanLayout& a, const ManhattanLayout& b);

// Depth metrics over gt's valid mask. RMSE in meters; delta1 = fraction with
// max(d/dhat, dhat/d) < 1.25.
double depth_rmse(const DepthMap& pred, const DepthMap& gt);
double depth_delta1(const DepthMap& pred, const DepthMap& gt);

// Invalidates gt pixels whose depth differs from the depth rendered out of
// the gt layout (rescaled to camera height 1.6) by more than the threshold.
DepthMap mask_gt_depth(const DepthMap& gt, const ManhattanLayout& gt_layout,
                       double threshold = 0.15);

// Per-element means; probabilities clamped to [1e-7, 1-1e-7].
double bce_loss(const Image& pred, const Image& gt);
double l1_loss(const Image& pred, const Image& gt);
double loss_equirect(const EquirectMaps& pred, const EquirectMaps& gt,
                     double alpha = 1.0, double beta = 1.0);
double loss_ceiling(const CeilingMaps& pred, const CeilingMaps& gt,
                    double pred_height, double gt_height, double gamma = 0.5);
double loss_columns(const ColumnPrediction& pred, const ColumnPrediction& gt);

// Corner-count confusion over buckets {4, 6, 8, >=10}.
struct ConfusionMatrix {
  std::array<std::array<int64_t, 4>, 4> counts{};  // [gt][pred]
  static int bucket(int corners);
  void add(int gt_corners, int pred_corners) {
    counts[bucket(gt_corners)][bucket(pred_corners)]++;
  }
};

struct LayoutEval {
  int corners_pred = 0;
  int corners_gt = 0;
  bool count_match = false;
  double iou2d_pct = 0.0;
  double iou3d_pct = 0.0;
  double pixel_err_pct = 0.0;
  std::optional<double> corner_err_pct;  // absent on count mismatch
  std::optional<double> rmse;
  std::optional<double> delta1;
};

// Full geometric comparison. Both layouts are normalized to camera height
// 1.6 before scale-sensitive metrics. gt_depth, when given, is compared
// against depth rendered from the normalized prediction over gt's mask.
LayoutEval evaluate_layouts(const ManhattanLayout& pred,
                            const ManhattanLayout& gt, int width, int height,
                            const DepthMap* gt_depth = nullptr);

}  // namespace panolayout
