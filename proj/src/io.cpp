#include "panolayout/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "panolayout/errors.hpp"

namespace panolayout {

static constexpr double kPi = 3.14159265358979323846;

namespace {

struct FileHandle {
  FILE* f = nullptr;
  explicit FileHandle(const std::string& path, const char* mode)
      : f(std::fopen(path.c_str(), mode)) {}
  ~FileHandle() {
    if (f) std::fclose(f);
  }
};

struct PngRead {
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngRead() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                 nullptr);
    if (png) info = png_create_info_struct(png);
  }
  ~PngRead() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWrite {
  png_structp png = nullptr;
  png_infop info = nullptr;
  PngWrite() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                  nullptr);
    if (png) info = png_create_info_struct(png);
  }
  ~PngWrite() { png_destroy_write_struct(&png, &info); }
};

}  // namespace

Image read_png(const std::string& path) {
  FileHandle file(path, "rb");
  if (!file.f) throw IoError("cannot open " + path);
  PngRead ctx;
  if (!ctx.png || !ctx.info) throw IoError("libpng init failed");
  std::vector<png_byte> raw;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(ctx.png)))
    throw IoError("failed to decode " + path);

  png_init_io(ctx.png, file.f);
  png_read_info(ctx.png, ctx.info);
  const int color = png_get_color_type(ctx.png, ctx.info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
  if (color == PNG_COLOR_TYPE_GRAY &&
      png_get_bit_depth(ctx.png, ctx.info) < 8)
    png_set_expand_gray_1_2_4_to_8(ctx.png);
  if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS))
    png_set_tRNS_to_alpha(ctx.png);
  png_set_strip_alpha(ctx.png);
  png_set_interlace_handling(ctx.png);
  png_read_update_info(ctx.png, ctx.info);

  const int w = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
  const int h = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
  const int channels = png_get_channels(ctx.png, ctx.info);
  const int depth = png_get_bit_depth(ctx.png, ctx.info);
  if (channels != 1 && channels != 3)
    throw IoError(path + ": unsupported channel count");

  const size_t stride = png_get_rowbytes(ctx.png, ctx.info);
  raw.resize(stride * h);
  rows.resize(h);
  for (int y = 0; y < h; ++y) rows[y] = raw.data() + stride * y;
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);

  Image img(w, h, channels);
  for (int y = 0; y < h; ++y) {
    const png_byte* row = rows[y];
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) {
        if (depth == 16) {
          const size_t i = 2 * (static_cast<size_t>(x) * channels + c);
          img.at(x, y, c) = ((row[i] << 8) | row[i + 1]) / 65535.f;
        } else {
          img.at(x, y, c) = row[x * channels + c] / 255.f;
        }
      }
  }
  return img;
}

namespace {

void write_png_impl(const std::string& path, int w, int h, int channels,
                    int depth, const std::vector<png_byte>& raw) {
  FileHandle file(path, "wb");
  if (!file.f) throw IoError("cannot open " + path + " for writing");
  PngWrite ctx;
  if (!ctx.png || !ctx.info) throw IoError("libpng init failed");
  std::vector<png_bytep> rows(h);
  const size_t stride = raw.size() / h;
  for (int y = 0; y < h; ++y)
    rows[y] = const_cast<png_bytep>(raw.data() + stride * y);
  if (setjmp(png_jmpbuf(ctx.png)))
    throw IoError("failed to encode " + path);

  png_init_io(ctx.png, file.f);
  png_set_IHDR(ctx.png, ctx.info, w, h, depth,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  png_write_image(ctx.png, rows.data());
  png_write_end(ctx.png, nullptr);
}

}  // namespace

void write_png(const std::string& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3)
    throw IoError("write_png: unsupported channel count");
  std::vector<png_byte> raw(static_cast<size_t>(img.width) * img.height *
                            img.channels * 2);
  size_t i = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        const double v = std::clamp(double(img.at(x, y, c)), 0.0, 1.0);
        const int q = static_cast<int>(std::lround(v * 65535.0));
        raw[i++] = static_cast<png_byte>(q >> 8);
        raw[i++] = static_cast<png_byte>(q & 0xff);
      }
  write_png_impl(path, img.width, img.height, img.channels, 16, raw);
}

void write_png8(const std::string& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3)
    throw IoError("write_png8: unsupported channel count");
  std::vector<png_byte> raw(static_cast<size_t>(img.width) * img.height *
                            img.channels);
  size_t i = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        const double v = std::clamp(double(img.at(x, y, c)), 0.0, 1.0);
        raw[i++] = static_cast<png_byte>(std::lround(v * 255.0));
      }
  write_png_impl(path, img.width, img.height, img.channels, 8, raw);
}

DepthMap read_depth_png(const std::string& path) {
  const Image img = read_png(path);
  if (img.channels != 1) throw IoError(path + ": depth must be grayscale");
  DepthMap d;
  d.width = img.width;
  d.height = img.height;
  d.depth.resize(img.pixel_count());
  d.valid.resize(img.pixel_count());
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const int mm =
          static_cast<int>(std::lround(img.at(x, y, 0) * 65535.0));
      d.depth[y * img.width + x] = mm / 1000.f;
      d.valid[y * img.width + x] = mm > 0;
    }
  return d;
}

void write_depth_png(const std::string& path, const DepthMap& depth) {
  std::vector<png_byte> raw(static_cast<size_t>(depth.width) * depth.height *
                            2);
  size_t i = 0;
  for (int p = 0; p < depth.width * depth.height; ++p) {
    int mm = 0;
    if (depth.valid[p])
      mm = std::clamp(
          static_cast<int>(std::lround(depth.depth[p] * 1000.0)), 1, 65535);
    raw[i++] = static_cast<png_byte>(mm >> 8);
    raw[i++] = static_cast<png_byte>(mm & 0xff);
  }
  write_png_impl(path, depth.width, depth.height, 1, 16, raw);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed to write " + path);
}

ManhattanLayout layout_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("plan")) {
      ManhattanLayout layout;
      for (const auto& v : j.at("plan"))
        layout.plan.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
      layout.cam_to_floor = j.at("cam_to_floor").get<double>();
      layout.cam_to_ceiling = j.at("cam_to_ceiling").get<double>();
      validate_layout(layout);
      return layout;
    }
    if (!j.contains("corners_uv"))
      throw IoError("layout JSON lacks plan and corners_uv");

    const auto& uv = j.at("corners_uv");
    const double height = j.at("height").get<double>();
    if (uv.size() < 8 || uv.size() % 2 != 0)
      throw IoError("corners_uv needs an even count of at least 8 entries");

    struct Pair {
      double u, phi_c, phi_f;
    };
    std::vector<Pair> pairs;
    for (size_t i = 0; i < uv.size(); i += 2) {
      const double uc = uv[i].at(0).get<double>();
      const double vc = uv[i].at(1).get<double>();
      const double uf = uv[i + 1].at(0).get<double>();
      const double vf = uv[i + 1].at(1).get<double>();
      const double phi_c = 0.5 * kPi * (1.0 - 2.0 * vc);
      const double phi_f = 0.5 * kPi * (1.0 - 2.0 * vf);
      if (phi_c <= 0 || phi_f >= 0)
        throw IoError("corner pair does not straddle the horizon");
      pairs.push_back({0.5 * (uc + uf), phi_c, phi_f});
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& a, const Pair& b) { return a.u < b.u; });

    // Split the height between floor and ceiling from the mean of the
    // per-corner ratios, then lift the floor ends.
    double floor_acc = 0.0;
    for (const Pair& p : pairs) {
      const double ratio = std::tan(p.phi_c) / -std::tan(p.phi_f);
      floor_acc += height / (1.0 + ratio);
    }
    const double cam_to_floor = floor_acc / pairs.size();
    std::vector<Vector2d> pts;
    for (const Pair& p : pairs) {
      const double theta = kPi * (2.0 * p.u - 1.0);
      const double r = cam_to_floor / std::tan(-p.phi_f);
      pts.emplace_back(r * std::sin(theta), r * std::cos(theta));
    }
    return layout_from_azimuth_corners(pts, cam_to_floor,
                                       height - cam_to_floor,
                                       0.10 * cam_to_floor / 1.6);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("layout JSON: ") + e.what());
  }
}

nlohmann::json layout_to_json(const ManhattanLayout& layout) {
  nlohmann::json plan = nlohmann::json::array();
  for (const Vector2d& v : layout.plan) plan.push_back({v.x(), v.y()});
  return {{"plan", plan},
          {"cam_to_floor", layout.cam_to_floor},
          {"cam_to_ceiling", layout.cam_to_ceiling}};
}

ManhattanLayout load_layout(const std::string& path) {
  return layout_from_json(read_json(path));
}

void save_layout(const std::string& path, const ManhattanLayout& layout) {
  write_json(path, layout_to_json(layout));
}

ColumnPrediction load_columns(const std::string& path) {
  const nlohmann::json j = read_json(path);
  try {
    ColumnPrediction cols;
    cols.width = j.at("width").get<int>();
    cols.ceiling_v = j.at("ceiling_v").get<std::vector<double>>();
    cols.floor_v = j.at("floor_v").get<std::vector<double>>();
    cols.corner_prob = j.at("corner_prob").get<std::vector<double>>();
    if (static_cast<int>(cols.ceiling_v.size()) != cols.width ||
        static_cast<int>(cols.floor_v.size()) != cols.width ||
        static_cast<int>(cols.corner_prob.size()) != cols.width)
      throw IoError(path + ": column arrays disagree with width");
    return cols;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

void save_columns(const std::string& path, const ColumnPrediction& cols) {
  write_json(path, {{"width", cols.width},
                    {"ceiling_v", cols.ceiling_v},
                    {"floor_v", cols.floor_v},
                    {"corner_prob", cols.corner_prob}});
}

std::vector<LineSegment> load_segments(const std::string& path) {
  const nlohmann::json j = read_json(path);
  try {
    std::vector<LineSegment> segs;
    for (const auto& e : j) {
      LineSegment s;
      for (int k = 0; k < 3; ++k) {
        s.a[k] = e.at("p0").at(k).get<double>();
        s.b[k] = e.at("p1").at(k).get<double>();
      }
      if (s.a.norm() < 1e-9 || s.b.norm() < 1e-9)
        throw IoError(path + ": zero-length segment direction");
      s.a.normalize();
      s.b.normalize();
      segs.push_back(s);
    }
    return segs;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

void save_segments(const std::string& path,
                   const std::vector<LineSegment>& segs) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : segs)
    j.push_back({{"p0", {s.a.x(), s.a.y(), s.a.z()}},
                 {"p1", {s.b.x(), s.b.y(), s.b.z()}}});
  write_json(path, j);
}

Matrix3d rotation_from_json(const nlohmann::json& j) {
  try {
    Matrix3d R;
    const auto& rows = j.at("R");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) R(r, c) = rows.at(r).at(c).get<double>();
    return R;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("rotation JSON: ") + e.what());
  }
}

nlohmann::json rotation_to_json(const Matrix3d& R) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 3; ++r)
    rows.push_back({R(r, 0), R(r, 1), R(r, 2)});
  return {{"R", rows}};
}

PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig cfg;
  try {
    cfg.width = j.value("width", cfg.width);
    cfg.height = j.value("height", cfg.height);
    if (j.contains("view")) {
      const auto& v = j["view"];
      cfg.view.fov_deg = v.value("fov_deg", cfg.view.fov_deg);
      cfg.view.size = v.value("size", cfg.view.size);
    }
    if (j.contains("noise")) {
      const auto& n = j["noise"];
      cfg.noise.blur_sigma = n.value("blur_sigma", cfg.noise.blur_sigma);
      cfg.noise.additive_sigma =
          n.value("additive_sigma", cfg.noise.additive_sigma);
      cfg.noise.peak_jitter = n.value("peak_jitter", cfg.noise.peak_jitter);
      cfg.noise.dropout_prob = n.value("dropout_prob", cfg.noise.dropout_prob);
      cfg.noise.rng_seed = n.value("rng_seed", cfg.noise.rng_seed);
    }
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      cfg.weights.w_junc = w.value("w_junc", cfg.weights.w_junc);
      cfg.weights.w_ceil = w.value("w_ceil", cfg.weights.w_ceil);
      cfg.weights.w_floor = w.value("w_floor", cfg.weights.w_floor);
    }
    if (j.contains("equirect")) {
      const auto& e = j["equirect"];
      cfg.equirect.step_px = e.value("step_px", cfg.equirect.step_px);
      cfg.equirect.max_iters = e.value("max_iters", cfg.equirect.max_iters);
      cfg.equirect.eps = e.value("eps", cfg.equirect.eps);
      cfg.equirect.fd_h_px = e.value("fd_h_px", cfg.equirect.fd_h_px);
      cfg.equirect.peak_threshold =
          e.value("peak_threshold", cfg.equirect.peak_threshold);
      cfg.equirect.peak_min_sep =
          e.value("peak_min_sep", cfg.equirect.peak_min_sep);
      cfg.equirect.rng_seed = e.value("rng_seed", cfg.equirect.rng_seed);
    }
    if (j.contains("ceiling")) {
      const auto& c = j["ceiling"];
      cfg.ceiling.threshold = c.value("threshold", cfg.ceiling.threshold);
      cfg.ceiling.dp_epsilon = c.value("dp_epsilon", cfg.ceiling.dp_epsilon);
      cfg.ceiling.cluster_radius =
          c.value("cluster_radius", cfg.ceiling.cluster_radius);
      cfg.ceiling.coverage = c.value("coverage", cfg.ceiling.coverage);
      cfg.ceiling.cuboid = c.value("cuboid", cfg.ceiling.cuboid);
    }
    if (j.contains("columns")) {
      const auto& c = j["columns"];
      cfg.columns.corner_threshold =
          c.value("corner_threshold", cfg.columns.corner_threshold);
      cfg.columns.corner_min_sep =
          c.value("corner_min_sep", cfg.columns.corner_min_sep);
      cfg.columns.inlier_dist = c.value("inlier_dist", cfg.columns.inlier_dist);
      cfg.columns.merge_dist = c.value("merge_dist", cfg.columns.merge_dist);
      cfg.columns.cam_to_floor =
          c.value("cam_to_floor", cfg.columns.cam_to_floor);
    }
    if (j.contains("align")) {
      const auto& a = j["align"];
      cfg.align.view_size = a.value("view_size", cfg.align.view_size);
      cfg.align.view_fov_deg = a.value("view_fov_deg", cfg.align.view_fov_deg);
      cfg.align.grad_threshold =
          a.value("grad_threshold", cfg.align.grad_threshold);
      cfg.align.min_length_px = a.value("min_length_px", cfg.align.min_length_px);
      cfg.align.max_rms_px = a.value("max_rms_px", cfg.align.max_rms_px);
      cfg.align.bin_deg = a.value("bin_deg", cfg.align.bin_deg);
      cfg.align.ortho_tol_deg = a.value("ortho_tol_deg", cfg.align.ortho_tol_deg);
      cfg.align.min_votes = a.value("min_votes", cfg.align.min_votes);
    }
    if (j.contains("bucket_proportions")) {
      cfg.bucket_proportions =
          j["bucket_proportions"].get<std::vector<double>>();
      if (cfg.bucket_proportions.size() != 4)
        throw IoError("bucket_proportions needs 4 entries");
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("config JSON: ") + e.what());
  }
  return cfg;
}

nlohmann::json config_to_json(const PipelineConfig& cfg) {
  return {{"width", cfg.width},
          {"height", cfg.height},
          {"view", {{"fov_deg", cfg.view.fov_deg}, {"size", cfg.view.size}}},
          {"noise",
           {{"blur_sigma", cfg.noise.blur_sigma},
            {"additive_sigma", cfg.noise.additive_sigma},
            {"peak_jitter", cfg.noise.peak_jitter},
            {"dropout_prob", cfg.noise.dropout_prob},
            {"rng_seed", cfg.noise.rng_seed}}},
          {"weights",
           {{"w_junc", cfg.weights.w_junc},
            {"w_ceil", cfg.weights.w_ceil},
            {"w_floor", cfg.weights.w_floor}}},
          {"equirect",
           {{"step_px", cfg.equirect.step_px},
            {"max_iters", cfg.equirect.max_iters},
            {"eps", cfg.equirect.eps},
            {"fd_h_px", cfg.equirect.fd_h_px},
            {"peak_threshold", cfg.equirect.peak_threshold},
            {"peak_min_sep", cfg.equirect.peak_min_sep},
            {"rng_seed", cfg.equirect.rng_seed}}},
          {"ceiling",
           {{"threshold", cfg.ceiling.threshold},
            {"dp_epsilon", cfg.ceiling.dp_epsilon},
            {"cluster_radius", cfg.ceiling.cluster_radius},
            {"coverage", cfg.ceiling.coverage},
            {"cuboid", cfg.ceiling.cuboid}}},
          {"columns",
           {{"corner_threshold", cfg.columns.corner_threshold},
            {"corner_min_sep", cfg.columns.corner_min_sep},
            {"inlier_dist", cfg.columns.inlier_dist},
            {"merge_dist", cfg.columns.merge_dist},
            {"cam_to_floor", cfg.columns.cam_to_floor}}},
          {"align",
           {{"view_size", cfg.align.view_size},
            {"view_fov_deg", cfg.align.view_fov_deg},
            {"grad_threshold", cfg.align.grad_threshold},
            {"min_length_px", cfg.align.min_length_px},
            {"max_rms_px", cfg.align.max_rms_px},
            {"bin_deg", cfg.align.bin_deg},
            {"ortho_tol_deg", cfg.align.ortho_tol_deg},
            {"min_votes", cfg.align.min_votes}}},
          {"bucket_proportions", cfg.bucket_proportions}};
}

PipelineConfig load_config(const std::string& path) {
  return config_from_json(read_json(path));
}

}  // namespace panolayout
