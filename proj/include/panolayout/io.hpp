#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "panolayout/alignment.hpp"
#include "panolayout/fit_ceiling.hpp"
#include "panolayout/fit_columns.hpp"
#include "panolayout/fit_equirect.hpp"
#include "panolayout/layout.hpp"
#include "panolayout/predict_stub.hpp"

namespace panolayout {

// PNG round trips. Float images in [0,1] are stored as 16-bit (1 channel
// grayscale, 3 channels RGB); 8-bit files load fine. write_png8 emits 8-bit
// RGB for overlays. Depth maps are 16-bit grayscale millimeters, 0 marking
// invalid pixels. All throw IoError.
Image read_png(const std::string& path);
void write_png(const std::string& path, const Image& img);
void write_png8(const std::string& path, const Image& img);
DepthMap read_depth_png(const std::string& path);
void write_depth_png(const std::string& path, const DepthMap& depth);

// JSON plumbing. Parse and filesystem problems raise IoError.
nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

// Layout JSON, canonical schema {plan:[[x,z],...], cam_to_floor,
// cam_to_ceiling}. The equirect-corner schema {corners_uv:[[u,v],...],
// height} with normalized coordinates in [0,1] and ceiling/floor pairs in
// column order is converted on load (camera height from the mean per-pair
// split, walls snapped through the azimuth-corner chain). Loaded layouts are
// validated.
ManhattanLayout load_layout(const std::string& path);
void save_layout(const std::string& path, const ManhattanLayout& layout);
ManhattanLayout layout_from_json(const nlohmann::json& j);
nlohmann::json layout_to_json(const ManhattanLayout& layout);

ColumnPrediction load_columns(const std::string& path);
void save_columns(const std::string& path, const ColumnPrediction& cols);

// Segment files: array of {p0:[x,y,z], p1:[x,y,z]} unit vectors.
std::vector<LineSegment> load_segments(const std::string& path);
void save_segments(const std::string& path,
                   const std::vector<LineSegment>& segs);

Matrix3d rotation_from_json(const nlohmann::json& j);
nlohmann::json rotation_to_json(const Matrix3d& R);

// CLI configuration; absent keys keep their defaults.
struct PipelineConfig {
  int width = 1024;
  int height = 512;
  PerspectiveConfig view;
  NoiseSpec noise;
  ScoreWeights weights;
  EquirectFitParams equirect;
  CeilingFitParams ceiling;
  ColumnFitParams columns;
  AlignParams align;
  // Share of rooms per corner-count bucket {4, 6, 8, >=10}.
  std::vector<double> bucket_proportions = {0.52, 0.22, 0.13, 0.13};
};
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::string& path);

}  // namespace panolayout
