// Command-line front end: align / synth / fit / eval / augment.
// Exit codes: 0 success, 1 algorithmic failure (PipelineError),
// 2 usage or IO problems.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "panolayout/augment.hpp"
#include "panolayout/errors.hpp"
#include "panolayout/io.hpp"
#include "panolayout/metrics.hpp"
#include "panolayout/parallel.hpp"

namespace fs = std::filesystem;
using namespace panolayout;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  const auto dt = Clock::now() - t0;
  const double ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(dt)
          .count();
  return std::max(ms, 1e-6);
}

std::vector<std::string> sorted_subdirs(const std::string& root) {
  if (!fs::is_directory(root))
    throw IoError("not a directory: " + root);
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

// ---------------------------------------------------------------- align --

struct AlignArgs {
  std::string input, output;
  std::string segments_in, segments_out, rotation_out, line_map;
};

int cmd_align(const PipelineConfig& cfg, const AlignArgs& a) {
  const auto t0 = Clock::now();
  const Image pano = read_png(a.input);
  const std::vector<LineSegment> segs =
      a.segments_in.empty() ? detect_segments_naive(pano, cfg.align)
                            : load_segments(a.segments_in);
  const ManhattanFrame frame = vote_vanishing_directions(segs, cfg.align);
  const Image aligned = align_panorama(pano, frame);
  write_png(a.output, aligned);
  if (!a.rotation_out.empty())
    write_json(a.rotation_out, rotation_to_json(frame.rotation()));
  if (!a.segments_out.empty()) save_segments(a.segments_out, segs);
  if (!a.line_map.empty())
    write_png(a.line_map,
              rasterize_line_map(segs, frame, pano.width, pano.height));
  json t{{"command", "align"},
         {"segments", segs.size()},
         {"ms", ms_since(t0)}};
  std::cout << t.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------- synth --

struct SynthArgs {
  std::string out_dir;
  std::string manifest_in;
  int count = 0;
  int per_bucket = 0;
  uint64_t seed = 1;
};

struct RoomSpec {
  std::string id;
  uint64_t seed = 0;
  int corners = 4;
};

// Largest-remainder split of total over the bucket proportions.
std::vector<int> bucket_counts(int total, const std::vector<double>& props) {
  const size_t n = props.size();
  std::vector<int> counts(n, 0);
  std::vector<std::pair<double, size_t>> rema;
  int assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    const double exact = props[i] * total;
    counts[i] = static_cast<int>(std::floor(exact));
    assigned += counts[i];
    rema.push_back({counts[i] - exact, i});  // ascending = largest remainder
  }
  std::stable_sort(rema.begin(), rema.end());
  for (int k = 0; k < total - assigned; ++k) counts[rema[k].second]++;
  return counts;
}

int corners_for_bucket(int bucket, int index_in_bucket) {
  if (bucket < 3) return 4 + 2 * bucket;
  return (index_in_bucket % 2 == 0) ? 10 : 12;
}

void synth_room(const PipelineConfig& cfg, const std::string& dir,
                const RoomSpec& room) {
  fs::create_directories(dir);
  const ManhattanLayout layout = sample_layout(room.seed, room.corners);
  save_layout(dir + "/layout.json", layout);

  NoiseSpec noisy = cfg.noise;
  noisy.rng_seed = cfg.noise.rng_seed + room.seed;
  const NoiseSpec clean{};

  const EquirectMaps eq = synth_equirect_maps(layout, cfg.width, cfg.height,
                                              noisy);
  write_png(dir + "/boundaries.png", eq.boundaries);
  write_png(dir + "/corners.png", eq.corners);
  const EquirectMaps eq0 = synth_equirect_maps(layout, cfg.width, cfg.height,
                                               clean);
  write_png(dir + "/boundaries_clean.png", eq0.boundaries);
  write_png(dir + "/corners_clean.png", eq0.corners);

  const CeilingMaps cm = synth_ceiling_maps(layout, cfg.width, cfg.height,
                                            cfg.view, noisy);
  write_png(dir + "/fc.png", cm.fc);
  write_png(dir + "/fp.png", cm.fp);
  const CeilingMaps cm0 = synth_ceiling_maps(layout, cfg.width, cfg.height,
                                             cfg.view, clean);
  write_png(dir + "/fc_clean.png", cm0.fc);
  write_png(dir + "/fp_clean.png", cm0.fp);

  save_columns(dir + "/columns.json",
               synth_columns(layout, cfg.width, cfg.height, noisy));
  save_columns(dir + "/columns_clean.json",
               synth_columns(layout, cfg.width, cfg.height, clean));

  // Depth ground truth lives in the camera-height-1.6 frame the metrics use.
  write_depth_png(dir + "/depth.png",
                  render_depth(rescale_to_camera_height(layout, 1.6),
                               cfg.width, cfg.height));
}

int cmd_synth(PipelineConfig cfg, const SynthArgs& a) {
  std::vector<RoomSpec> rooms;
  uint64_t base_seed = a.seed;
  if (!a.manifest_in.empty()) {
    const json m = read_json(a.manifest_in);
    try {
      cfg = config_from_json(m.at("config"));
      base_seed = m.at("seed").get<uint64_t>();
      for (const auto& r : m.at("rooms")) {
        rooms.push_back({r.at("id").get<std::string>(),
                         r.at("seed").get<uint64_t>(),
                         r.at("corners").get<int>()});
      }
    } catch (const json::exception& e) {
      throw IoError(std::string("bad manifest: ") + e.what());
    }
  } else {
    std::vector<int> counts;
    if (a.per_bucket > 0)
      counts.assign(4, a.per_bucket);
    else if (a.count > 0)
      counts = bucket_counts(a.count, cfg.bucket_proportions);
    else
      throw IoError("synth needs --count, --per-bucket, or --manifest");
    int index = 0;
    for (int b = 0; b < 4; ++b) {
      for (int k = 0; k < counts[b]; ++k) {
        char id[16];
        std::snprintf(id, sizeof(id), "%04d", index);
        rooms.push_back({id, base_seed + static_cast<uint64_t>(index),
                         corners_for_bucket(b, k)});
        ++index;
      }
    }
  }

  fs::create_directories(fs::path(a.out_dir) / "rooms");
  const auto t0 = Clock::now();
  std::vector<std::string> errors(rooms.size());
  parallel_for(static_cast<int>(rooms.size()), [&](int i) {
    const std::string dir =
        (fs::path(a.out_dir) / "rooms" / rooms[i].id).string();
    try {
      synth_room(cfg, dir, rooms[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (size_t i = 0; i < rooms.size(); ++i)
    if (!errors[i].empty())
      throw PipelineError("room " + rooms[i].id + ": " + errors[i]);

  json manifest{{"seed", base_seed}, {"config", config_to_json(cfg)}};
  manifest["rooms"] = json::array();
  for (const RoomSpec& r : rooms)
    manifest["rooms"].push_back(
        {{"id", r.id}, {"seed", r.seed}, {"corners", r.corners}});
  write_json((fs::path(a.out_dir) / "manifest.json").string(), manifest);

  json t{{"command", "synth"},
         {"rooms", rooms.size()},
         {"ms", ms_since(t0)}};
  std::cout << t.dump() << "\n";
  return 0;
}

// ------------------------------------------------------------------ fit --

struct FitArgs {
  std::string method;
  std::string boundaries, corners, fc, fp, columns;
  std::string output;
  std::string dataset, out_dir;
  double height = 0.0;
  bool cuboid = false;
  bool clean = false;
};

ManhattanLayout fit_one(const PipelineConfig& cfg, const FitArgs& a,
                        const std::string& boundaries,
                        const std::string& corners, const std::string& fc,
                        const std::string& fp, const std::string& columns) {
  if (a.method == "equirect") {
    EquirectMaps maps{read_png(boundaries), read_png(corners)};
    return fit_equirect(maps, cfg.weights, cfg.equirect);
  }
  if (a.method == "ceiling") {
    CeilingMaps maps{read_png(fc), read_png(fp)};
    const double H = a.height > 0.0
                         ? a.height
                         : ceiling_height_from_columns(load_columns(columns));
    CeilingFitParams params = cfg.ceiling;
    params.cuboid = params.cuboid || a.cuboid;
    return fit_ceiling(maps, H, cfg.view, params);
  }
  if (a.method == "columns")
    return fit_columns(load_columns(columns), cfg.columns);
  throw IoError("unknown fit method: " + a.method);
}

int cmd_fit(const PipelineConfig& cfg, const FitArgs& a) {
  if (!a.dataset.empty()) {
    if (a.out_dir.empty()) throw IoError("batch fit needs --output-dir");
    const std::string suffix = a.clean ? "_clean" : "";
    const std::vector<std::string> ids = sorted_subdirs(a.dataset);
    if (ids.empty()) throw IoError("no room directories in " + a.dataset);
    std::vector<json> lines(ids.size());
    int n_ok = 0;
    parallel_for(static_cast<int>(ids.size()), [&](int i) {
      const fs::path in = fs::path(a.dataset) / ids[i];
      const fs::path out = fs::path(a.out_dir) / ids[i];
      const auto t0 = Clock::now();
      try {
        const ManhattanLayout layout = fit_one(
            cfg, a, (in / ("boundaries" + suffix + ".png")).string(),
            (in / ("corners" + suffix + ".png")).string(),
            (in / ("fc" + suffix + ".png")).string(),
            (in / ("fp" + suffix + ".png")).string(),
            (in / ("columns" + suffix + ".json")).string());
        fs::create_directories(out);
        save_layout((out / "layout.json").string(), layout);
        lines[i] = {{"id", ids[i]}, {"method", a.method},
                    {"ms", ms_since(t0)}, {"ok", true}};
      } catch (const std::exception& e) {
        lines[i] = {{"id", ids[i]}, {"method", a.method},
                    {"ms", ms_since(t0)}, {"ok", false},
                    {"error", e.what()}};
      }
    });
    for (const json& line : lines) {
      std::cout << line.dump() << "\n";
      if (line.at("ok").get<bool>()) ++n_ok;
    }
    if (n_ok == 0) throw PipelineError("every room failed to fit");
    return 0;
  }

  if (a.output.empty()) throw IoError("fit needs --output or --dataset");
  const auto t0 = Clock::now();
  const ManhattanLayout layout =
      fit_one(cfg, a, a.boundaries, a.corners, a.fc, a.fp, a.columns);
  const double ms = ms_since(t0);
  save_layout(a.output, layout);
  json t{{"command", "fit"}, {"method", a.method}, {"ms", ms}};
  std::cout << t.dump() << "\n";
  return 0;
}

// ----------------------------------------------------------------- eval --

struct EvalArgs {
  std::string pred_dir, gt_dir;
  std::string report, csv, overlays;
};

struct RoomResult {
  bool skipped = false;
  LayoutEval ev;
};

Image boundary_overlay(const ManhattanLayout& pred, const ManhattanLayout& gt,
                       int width, int height) {
  const Image pb = render_boundary_map(pred, width, height, false);
  const Image gb = render_boundary_map(gt, width, height, false);
  Image out(width, height, 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      float p = 0.0f, g = 0.0f;
      for (int c = 0; c < 3; ++c) {
        p = std::max(p, pb.at(x, y, c));
        g = std::max(g, gb.at(x, y, c));
      }
      out.at(x, y, 0) = p;  // prediction in red, ground truth in green
      out.at(x, y, 1) = g;
    }
  }
  return out;
}

std::string csv_cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

int cmd_eval(const PipelineConfig& cfg, const EvalArgs& a) {
  const auto t0 = Clock::now();
  std::vector<std::string> ids;
  for (const std::string& id : sorted_subdirs(a.gt_dir))
    if (fs::exists(fs::path(a.gt_dir) / id / "layout.json")) ids.push_back(id);
  if (ids.empty()) throw IoError("no ground-truth rooms in " + a.gt_dir);
  if (!a.overlays.empty()) fs::create_directories(a.overlays);

  std::vector<RoomResult> results(ids.size());
  std::vector<std::string> errors(ids.size());
  parallel_for(static_cast<int>(ids.size()), [&](int i) {
    try {
      const fs::path gt_room = fs::path(a.gt_dir) / ids[i];
      const fs::path pred_file = fs::path(a.pred_dir) / ids[i] / "layout.json";
      if (!fs::exists(pred_file)) {
        results[i].skipped = true;
        return;
      }
      const ManhattanLayout gt = load_layout((gt_room / "layout.json").string());
      const ManhattanLayout pred = load_layout(pred_file.string());
      std::optional<DepthMap> masked;
      const fs::path depth_file = gt_room / "depth.png";
      if (fs::exists(depth_file))
        masked = mask_gt_depth(read_depth_png(depth_file.string()), gt);
      results[i].ev = evaluate_layouts(pred, gt, cfg.width, cfg.height,
                                       masked ? &*masked : nullptr);
      if (!a.overlays.empty())
        write_png8((fs::path(a.overlays) / (ids[i] + ".png")).string(),
                   boundary_overlay(pred, gt, cfg.width, cfg.height));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (size_t i = 0; i < ids.size(); ++i)
    if (!errors[i].empty())
      throw PipelineError("room " + ids[i] + ": " + errors[i]);

  // Aggregation: overall plus one row per ground-truth corner bucket.
  struct Acc {
    int n = 0, n_match = 0, n_corner = 0, n_depth = 0;
    double iou2d = 0, iou3d = 0, pix = 0, corner = 0, rmse = 0, delta1 = 0;
    void add(const LayoutEval& ev) {
      ++n;
      iou2d += ev.iou2d_pct;
      iou3d += ev.iou3d_pct;
      pix += ev.pixel_err_pct;
      if (ev.count_match) ++n_match;
      if (ev.corner_err_pct) { corner += *ev.corner_err_pct; ++n_corner; }
      if (ev.rmse) { rmse += *ev.rmse; ++n_depth; }
      if (ev.delta1) delta1 += *ev.delta1;
    }
    json to_json() const {
      json j{{"count", n},
             {"count_match_rate", n ? double(n_match) / n : 0.0}};
      j["mean_iou2d_pct"] = n ? iou2d / n : 0.0;
      j["mean_iou3d_pct"] = n ? iou3d / n : 0.0;
      j["mean_pixel_err_pct"] = n ? pix / n : 0.0;
      if (n_corner) j["mean_corner_err_pct"] = corner / n_corner;
      if (n_depth) {
        j["mean_rmse"] = rmse / n_depth;
        j["mean_delta1"] = delta1 / n_depth;
      }
      return j;
    }
  };
  Acc overall;
  std::array<Acc, 4> per_bucket;
  ConfusionMatrix confusion;
  json room_rows = json::array();
  json skipped = json::array();
  std::vector<std::string> csv_rows;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (results[i].skipped) {
      skipped.push_back(ids[i]);
      continue;
    }
    const LayoutEval& ev = results[i].ev;
    overall.add(ev);
    per_bucket[ConfusionMatrix::bucket(ev.corners_gt)].add(ev);
    confusion.add(ev.corners_gt, ev.corners_pred);
    json row{{"id", ids[i]},
             {"corners_gt", ev.corners_gt},
             {"corners_pred", ev.corners_pred},
             {"count_match", ev.count_match},
             {"iou2d_pct", ev.iou2d_pct},
             {"iou3d_pct", ev.iou3d_pct},
             {"pixel_err_pct", ev.pixel_err_pct}};
    if (ev.corner_err_pct) row["corner_err_pct"] = *ev.corner_err_pct;
    if (ev.rmse) row["rmse"] = *ev.rmse;
    if (ev.delta1) row["delta1"] = *ev.delta1;
    room_rows.push_back(row);
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%.6f,%.6f,%.6f",
                  ids[i].c_str(), ev.corners_gt, ev.corners_pred,
                  ev.count_match ? 1 : 0, ev.iou2d_pct, ev.iou3d_pct,
                  ev.pixel_err_pct);
    csv_rows.push_back(std::string(buf) + "," + csv_cell(ev.corner_err_pct) +
                       "," + csv_cell(ev.rmse) + "," + csv_cell(ev.delta1));
  }

  json report{{"width", cfg.width}, {"height", cfg.height}};
  report["rooms"] = room_rows;
  report["skipped"] = skipped;
  report["aggregate"] = overall.to_json();
  const char* bucket_names[4] = {"bucket_4", "bucket_6", "bucket_8",
                                 "bucket_10plus"};
  for (int b = 0; b < 4; ++b)
    report["aggregate_by_bucket"][bucket_names[b]] = per_bucket[b].to_json();
  json conf = json::array();
  for (int g = 0; g < 4; ++g) {
    json row = json::array();
    for (int p = 0; p < 4; ++p) row.push_back(confusion.counts[g][p]);
    conf.push_back(row);
  }
  report["confusion"] = conf;
  if (!a.report.empty()) write_json(a.report, report);

  if (!a.csv.empty()) {
    std::string csv =
        "id,corners_gt,corners_pred,count_match,iou2d_pct,iou3d_pct,"
        "pixel_err_pct,corner_err_pct,rmse,delta1\n";
    for (const std::string& row : csv_rows) csv += row + "\n";
    auto agg_row = [](const char* name, const Acc& acc) {
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%s,%d,,%.6f,%.6f,%.6f,%.6f", name,
                    acc.n, acc.n ? double(acc.n_match) / acc.n : 0.0,
                    acc.n ? acc.iou2d / acc.n : 0.0,
                    acc.n ? acc.iou3d / acc.n : 0.0,
                    acc.n ? acc.pix / acc.n : 0.0);
      std::string row(buf);
      row += "," + csv_cell(acc.n_corner
                                ? std::optional<double>(acc.corner /
                                                        acc.n_corner)
                                : std::nullopt);
      row += "," + csv_cell(acc.n_depth
                                ? std::optional<double>(acc.rmse / acc.n_depth)
                                : std::nullopt);
      row += "," + csv_cell(acc.n_depth
                                ? std::optional<double>(acc.delta1 /
                                                        acc.n_depth)
                                : std::nullopt);
      return row + "\n";
    };
    for (int b = 0; b < 4; ++b) csv += agg_row(bucket_names[b], per_bucket[b]);
    csv += agg_row("overall", overall);
    std::ofstream out(a.csv, std::ios::binary);
    if (!out) throw IoError("cannot write " + a.csv);
    out << csv;
  }

  json t{{"command", "eval"},
         {"rooms", room_rows.size()},
         {"skipped", skipped.size()},
         {"mean_iou3d_pct", overall.n ? overall.iou3d / overall.n : 0.0},
         {"ms", ms_since(t0)}};
  std::cout << t.dump() << "\n";
  return 0;
}

// -------------------------------------------------------------- augment --

struct AugmentArgs {
  std::string input, layout_in, output, layout_out;
  std::string op;
  double kx = 1.5, kz = 1.5;
  bool random = false;
  uint64_t seed = 1;
  int columns = 0;
  double gamma = 1.0;
};

int cmd_augment(const PipelineConfig&, const AugmentArgs& a) {
  const Image pano = read_png(a.input);
  Augmented out;
  if (a.op == "luminance") {
    out.pano = luminance(pano, a.gamma);
    if (!a.layout_in.empty()) out.layout = load_layout(a.layout_in);
  } else {
    if (a.layout_in.empty()) throw IoError(a.op + " needs --layout");
    const ManhattanLayout layout = load_layout(a.layout_in);
    if (a.op == "stretch") {
      if (a.random) {
        double kx = 1.0, kz = 1.0;
        out = random_stretch(pano, layout, a.kx, a.kz, a.seed, &kx, &kz);
        json t{{"command", "augment"}, {"op", "stretch"},
               {"kx", kx}, {"kz", kz}};
        std::cout << t.dump() << "\n";
      } else {
        out = apply_stretch(pano, layout, a.kx, a.kz);
      }
    } else if (a.op == "rotate") {
      out = pano_rotate(pano, layout, a.columns);
    } else if (a.op == "flip") {
      out = pano_flip(pano, layout);
    } else {
      throw IoError("unknown augment op: " + a.op);
    }
  }
  write_png(a.output, out.pano);
  if (!a.layout_out.empty()) {
    if (out.layout.plan.empty())
      throw IoError("--layout-out needs an input layout");
    save_layout(a.layout_out, out.layout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Manhattan room layout pipeline"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "pipeline configuration JSON");

  AlignArgs al;
  CLI::App* align = app.add_subcommand("align", "vanishing-point alignment");
  align->add_option("--input", al.input, "panorama PNG")->required();
  align->add_option("--output", al.output, "aligned panorama PNG")->required();
  align->add_option("--segments", al.segments_in,
                    "precomputed line segments JSON (skips the detector)");
  align->add_option("--segments-out", al.segments_out, "detected segments");
  align->add_option("--rotation-out", al.rotation_out, "rotation matrix JSON");
  align->add_option("--line-map", al.line_map, "rasterized segment map PNG");

  SynthArgs sy;
  CLI::App* synth = app.add_subcommand("synth", "synthetic dataset generator");
  synth->add_option("--out", sy.out_dir, "dataset directory")->required();
  synth->add_option("--count", sy.count, "total room count");
  synth->add_option("--per-bucket", sy.per_bucket,
                    "rooms per corner bucket (overrides --count)");
  synth->add_option("--seed", sy.seed, "base RNG seed");
  synth->add_option("--manifest", sy.manifest_in,
                    "regenerate from an existing manifest");

  FitArgs fi;
  CLI::App* fit = app.add_subcommand("fit", "layout fitting");
  fit->add_option("--method", fi.method, "equirect | ceiling | columns")
      ->required();
  fit->add_option("--boundaries", fi.boundaries, "boundary map PNG");
  fit->add_option("--corners", fi.corners, "corner map PNG");
  fit->add_option("--fc", fi.fc, "equirect ceiling+floor probability PNG");
  fit->add_option("--fp", fi.fp, "ceiling-view plan probability PNG");
  fit->add_option("--columns", fi.columns, "column prediction JSON");
  fit->add_option("--height", fi.height,
                  "room height override, camera 1.6 under the ceiling");
  fit->add_option("--output", fi.output, "layout JSON (single input)");
  fit->add_option("--dataset", fi.dataset, "room directory tree (batch)");
  fit->add_option("--output-dir", fi.out_dir, "batch output tree");
  fit->add_flag("--cuboid", fi.cuboid, "restrict ceiling fit to a rectangle");
  fit->add_flag("--clean", fi.clean, "use *_clean inputs in batch mode");

  EvalArgs ev;
  CLI::App* eval = app.add_subcommand("eval", "metric suite");
  eval->add_option("--pred", ev.pred_dir, "predicted layout tree")->required();
  eval->add_option("--gt", ev.gt_dir, "ground-truth room tree")->required();
  eval->add_option("--report", ev.report, "report JSON");
  eval->add_option("--csv", ev.csv, "per-room and per-bucket CSV");
  eval->add_option("--overlays", ev.overlays, "boundary overlay directory");

  AugmentArgs au;
  CLI::App* augment = app.add_subcommand("augment", "panorama augmentation");
  augment->add_option("--input", au.input, "panorama PNG")->required();
  augment->add_option("--layout", au.layout_in, "layout JSON");
  augment->add_option("--op", au.op, "stretch | rotate | flip | luminance")
      ->required();
  augment->add_option("--kx", au.kx, "x stretch factor (or max with --random)");
  augment->add_option("--kz", au.kz, "z stretch factor (or max with --random)");
  augment->add_flag("--random", au.random, "draw stretch factors");
  augment->add_option("--seed", au.seed, "stretch RNG seed");
  augment->add_option("--columns", au.columns, "rotation in pixel columns");
  augment->add_option("--gamma", au.gamma, "luminance exponent");
  augment->add_option("--output", au.output, "panorama PNG out")->required();
  augment->add_option("--layout-out", au.layout_out, "layout JSON out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (align->parsed()) return cmd_align(cfg, al);
    if (synth->parsed()) return cmd_synth(cfg, sy);
    if (fit->parsed()) return cmd_fit(cfg, fi);
    if (eval->parsed()) return cmd_eval(cfg, ev);
    if (augment->parsed()) return cmd_augment(cfg, au);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
