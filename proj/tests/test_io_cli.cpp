#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <doctest.h>

#include "panolayout/errors.hpp"
#include "panolayout/io.hpp"
#include "panolayout/metrics.hpp"

using namespace panolayout;
namespace fs = std::filesystem;

namespace {
constexpr double kPi = 3.14159265358979323846;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Image random_image(int w, int h, int c, uint64_t seed) {
  Image img(w, h, c);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.f, 1.f);
  for (float& v : img.data) v = u(rng);
  return img;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int exit_code = -1;
  std::string output;
};

std::string cli_binary() {
  if (const char* bin = std::getenv("PANOLAYOUT_BIN")) return bin;
  for (const char* c : {"./panolayout", "build/panolayout", "./build/panolayout"})
    if (fs::exists(c)) return c;
  return "panolayout";
}

RunResult run_cli(const std::string& args) {
  const std::string cmd = cli_binary() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe)) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("float PNGs round trip at 16-bit precision") {
  const fs::path dir = fresh_dir("pl_io_png");
  for (int c : {1, 3}) {
    const Image img = random_image(40, 25, c, 100 + c);
    const std::string path = (dir / ("img" + std::to_string(c) + ".png")).string();
    write_png(path, img);
    const Image back = read_png(path);
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    REQUIRE(back.channels == c);
    for (size_t i = 0; i < img.data.size(); ++i)
      CHECK(std::abs(back.data[i] - img.data[i]) < 1.0f / 65535.0f);
  }
}

TEST_CASE("8-bit overlays round trip at 8-bit precision") {
  const fs::path dir = fresh_dir("pl_io_png8");
  const Image img = random_image(31, 17, 3, 5);
  const std::string path = (dir / "overlay.png").string();
  write_png8(path, img);
  const Image back = read_png(path);
  REQUIRE(back.channels == 3);
  for (size_t i = 0; i < img.data.size(); ++i)
    CHECK(std::abs(back.data[i] - img.data[i]) <= 0.5f / 255.0f + 1e-6f);
}

TEST_CASE("depth PNGs store millimeters and keep invalid pixels") {
  const fs::path dir = fresh_dir("pl_io_depth");
  DepthMap d;
  d.width = 24;
  d.height = 12;
  d.depth.resize(d.width * d.height);
  d.valid.resize(d.width * d.height);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<float> u(0.3f, 14.0f);
  for (int i = 0; i < d.width * d.height; ++i) {
    d.valid[i] = (i % 7 != 0);
    d.depth[i] = d.valid[i] ? u(rng) : 0.f;
  }
  const std::string path = (dir / "depth.png").string();
  write_depth_png(path, d);
  const DepthMap back = read_depth_png(path);
  REQUIRE(back.width == d.width);
  REQUIRE(back.height == d.height);
  for (int i = 0; i < d.width * d.height; ++i) {
    CHECK(back.valid[i] == d.valid[i]);
    if (d.valid[i]) CHECK(std::abs(back.depth[i] - d.depth[i]) < 5.1e-4f);
  }
}

TEST_CASE("canonical layout JSON round trips exactly") {
  const fs::path dir = fresh_dir("pl_io_layout");
  ManhattanLayout l;
  l.plan = {{-2.125, -1.5}, {2.5, -1.5}, {2.5, 0.75},
            {1.0, 0.75},    {1.0, 2.0},  {-2.125, 2.0}};
  l.cam_to_floor = 1.55;
  l.cam_to_ceiling = 1.35;
  const std::string path = (dir / "layout.json").string();
  save_layout(path, l);
  const ManhattanLayout back = load_layout(path);
  REQUIRE(back.plan.size() == l.plan.size());
  for (size_t i = 0; i < l.plan.size(); ++i)
    CHECK((back.plan[i] - l.plan[i]).norm() < 1e-12);
  CHECK(back.cam_to_floor == doctest::Approx(l.cam_to_floor).epsilon(1e-12));
  CHECK(back.cam_to_ceiling == doctest::Approx(l.cam_to_ceiling).epsilon(1e-12));
}

TEST_CASE("equirect corner JSON reconstructs the room") {
  ManhattanLayout gt;
  gt.plan = {{-2.0, -1.5}, {2.5, -1.5}, {2.5, 2.0}, {-2.0, 2.0}};
  gt.cam_to_floor = 1.5;
  gt.cam_to_ceiling = 1.3;

  nlohmann::json uv = nlohmann::json::array();
  for (const Vector2d& p : gt.plan) {
    const double theta = std::atan2(p.x(), p.y());
    const double r = p.norm();
    const double u = (theta / kPi + 1.0) * 0.5;
    const double vc = 0.5 - std::atan2(gt.cam_to_ceiling, r) / kPi;
    const double vf = 0.5 + std::atan2(gt.cam_to_floor, r) / kPi;
    uv.push_back({u, vc});
    uv.push_back({u, vf});
  }
  const nlohmann::json j = {{"corners_uv", uv}, {"height", gt.height()}};

  const ManhattanLayout back = layout_from_json(j);
  REQUIRE(back.plan.size() == 4);
  CHECK(back.cam_to_floor == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(iou3d(back, gt) > 99.5);
}

TEST_CASE("column prediction JSON round trips exactly") {
  const fs::path dir = fresh_dir("pl_io_cols");
  const ManhattanLayout l = sample_layout(3, 6);
  const ColumnPrediction cols = synth_columns(l, 128, 64, NoiseSpec{});
  const std::string path = (dir / "columns.json").string();
  save_columns(path, cols);
  const ColumnPrediction back = load_columns(path);
  REQUIRE(back.width == cols.width);
  REQUIRE(back.ceiling_v.size() == cols.ceiling_v.size());
  for (size_t i = 0; i < cols.ceiling_v.size(); ++i) {
    CHECK(back.ceiling_v[i] == doctest::Approx(cols.ceiling_v[i]).epsilon(1e-12));
    CHECK(back.floor_v[i] == doctest::Approx(cols.floor_v[i]).epsilon(1e-12));
    CHECK(back.corner_prob[i] ==
          doctest::Approx(cols.corner_prob[i]).epsilon(1e-12));
  }
}

TEST_CASE("segments and rotations round trip exactly") {
  const fs::path dir = fresh_dir("pl_io_segs");
  std::vector<LineSegment> segs;
  segs.push_back({Vector3d(0.6, 0.0, 0.8), Vector3d(0.0, 0.6, 0.8), 2});
  segs.push_back({Vector3d(-0.8, 0.6, 0.0).normalized(),
                  Vector3d(0.0, 0.0, -1.0), 5});
  const std::string spath = (dir / "segs.json").string();
  save_segments(spath, segs);
  const std::vector<LineSegment> back = load_segments(spath);
  REQUIRE(back.size() == segs.size());
  for (size_t i = 0; i < segs.size(); ++i) {
    CHECK((back[i].a - segs[i].a).norm() < 1e-12);
    CHECK((back[i].b - segs[i].b).norm() < 1e-12);
  }

  const Matrix3d r = rot_x(0.31) * rot_y(-1.07);
  const Matrix3d rb = rotation_from_json(rotation_to_json(r));
  CHECK((rb - r).norm() < 1e-12);
}

TEST_CASE("pipeline configuration honors defaults and overrides") {
  PipelineConfig cfg;
  cfg.width = 512;
  cfg.height = 256;
  cfg.view.fov_deg = 150.0;
  cfg.view.size = 300;
  cfg.noise.blur_sigma = 1.5;
  cfg.noise.dropout_prob = 0.2;
  cfg.bucket_proportions = {0.4, 0.3, 0.2, 0.1};
  const PipelineConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.width == 512);
  CHECK(back.height == 256);
  CHECK(back.view.fov_deg == doctest::Approx(150.0));
  CHECK(back.view.size == 300);
  CHECK(back.noise.blur_sigma == doctest::Approx(1.5));
  CHECK(back.noise.dropout_prob == doctest::Approx(0.2));
  REQUIRE(back.bucket_proportions.size() == 4);
  CHECK(back.bucket_proportions[1] == doctest::Approx(0.3));

  const PipelineConfig def = config_from_json(nlohmann::json::object());
  CHECK(def.width == 1024);
  CHECK(def.height == 512);
  CHECK(def.view.fov_deg == doctest::Approx(160.0));
  CHECK(def.noise.blur_sigma == doctest::Approx(0.0));
}

TEST_CASE("missing or malformed inputs raise IoError") {
  const fs::path dir = fresh_dir("pl_io_bad");
  CHECK_THROWS_AS(read_png((dir / "absent.png").string()), IoError);
  CHECK_THROWS_AS(read_json((dir / "absent.json").string()), IoError);

  std::ofstream((dir / "garbage.json").string()) << "{not json";
  CHECK_THROWS_AS(read_json((dir / "garbage.json").string()), IoError);

  std::ofstream((dir / "plain.txt").string()) << "hello";
  CHECK_THROWS_AS(read_png((dir / "plain.txt").string()), IoError);

  CHECK_THROWS_AS(layout_from_json({{"height", 3.0}}), IoError);
  CHECK_THROWS_AS(
      layout_from_json({{"corners_uv", {{0.1, 0.2}}}, {"height", 3.0}}),
      IoError);
}

TEST_CASE("cli rejects bad invocations with exit code 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("fit --method equirect --boundaries /nonexistent.png "
                "--corners /nonexistent.png --output /tmp/x.json")
            .exit_code == 2);
  CHECK(run_cli("fit --method bogus --columns /nonexistent.json "
                "--output /tmp/x.json")
            .exit_code == 2);
  const RunResult ev = run_cli("eval --pred /nonexistent_a --gt /nonexistent_b");
  CHECK(ev.exit_code == 2);
}

TEST_CASE("cli synth is reproducible and feeds fit and eval") {
  const fs::path base = fresh_dir("pl_cli");
  const std::string d1 = (base / "a").string();
  const std::string d2 = (base / "b").string();
  const std::string d3 = (base / "c").string();

  const RunResult s1 = run_cli("synth --out " + d1 + " --count 3 --seed 11");
  CHECK(s1.exit_code == 0);
  REQUIRE(fs::exists(fs::path(d1) / "manifest.json"));
  int room_dirs = 0;
  for (const auto& e : fs::directory_iterator(fs::path(d1) / "rooms"))
    room_dirs += e.is_directory();
  CHECK(room_dirs == 3);
  for (const char* f :
       {"layout.json", "boundaries.png", "corners.png", "fc.png", "fp.png",
        "columns.json", "depth.png", "boundaries_clean.png"})
    CHECK(fs::exists(fs::path(d1) / "rooms" / "0000" / f));

  // Same seed, then manifest regeneration: byte-identical artifacts.
  const RunResult s2 = run_cli("synth --out " + d2 + " --count 3 --seed 11");
  CHECK(s2.exit_code == 0);
  const RunResult s3 = run_cli("synth --out " + d3 + " --manifest " + d1 +
                               "/manifest.json");
  CHECK(s3.exit_code == 0);
  for (const char* f : {"layout.json", "boundaries.png", "columns.json"}) {
    const std::string ref = slurp(fs::path(d1) / "rooms" / "0001" / f);
    CHECK(slurp(fs::path(d2) / "rooms" / "0001" / f) == ref);
    CHECK(slurp(fs::path(d3) / "rooms" / "0001" / f) == ref);
  }

  // Single-input fit on a synthesized room.
  const std::string room = d1 + "/rooms/0000";
  const std::string fit_out = (base / "fit.json").string();
  const RunResult ft = run_cli("fit --method columns --columns " + room +
                               "/columns.json --output " + fit_out);
  CHECK(ft.exit_code == 0);
  const ManhattanLayout pred = load_layout(fit_out);
  const ManhattanLayout gt = load_layout(room + "/layout.json");
  CHECK(iou2d(pred.plan, gt.plan) > 99.0);

  // Self-evaluation of the ground truth tree is perfect.
  const std::string report = (base / "report.json").string();
  const RunResult ev = run_cli("eval --pred " + d1 + "/rooms --gt " + d1 +
                               "/rooms --report " + report);
  CHECK(ev.exit_code == 0);
  const nlohmann::json rep = read_json(report);
  CHECK(rep.at("aggregate").at("count").get<int>() == 3);
  CHECK(rep.at("aggregate").at("mean_iou2d_pct").get<double>() ==
        doctest::Approx(100.0).epsilon(1e-6));
  CHECK(rep.at("aggregate").at("count_match_rate").get<double>() ==
        doctest::Approx(1.0));
}
