#include <filesystem>
#include <fstream>
#include <random>

#include "bimvs/io.hpp"
#include "doctest.h"

using namespace bimvs;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "bimvs_io_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_text(const std::string& name, const std::string& text) {
  const fs::path path = temp_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path.string();
}

}  // namespace

TEST_CASE("pfm: 1x1 and 3x2 grids round-trip bit-exactly") {
  const auto path = (temp_dir() / "a.pfm").string();
  GridD one(1, 1, 42.0);
  write_pfm(path, one);
  CHECK(read_pfm(path) == one);

  GridD grid(2, 3, 0.0);
  grid(0, 0) = 1.5;
  grid(0, 1) = -2.25;
  grid(0, 2) = 0.0;
  grid(1, 0) = 3.0e-7f;
  grid(1, 1) = 1234.5;
  grid(1, 2) = -0.125;
  write_pfm(path, grid);
  CHECK(read_pfm(path) == grid);
}

TEST_CASE("pfm: color variant is rejected, not misread") {
  const auto path =
      write_text("color.pfm", std::string("PF\n2 2\n-1.0\n") +
                                  std::string(48, '\0'));
  CHECK_THROWS_AS(read_pfm(path), MalformedHeader);
}

TEST_CASE("pfm: truncated payload reports unexpected EOF") {
  const auto path = write_text("short.pfm", "Pf\n4 4\n-1.0\nabc");
  CHECK_THROWS_AS(read_pfm(path), UnexpectedEof);
}

TEST_CASE("pfm: missing file reports an IO error") {
  CHECK_THROWS_AS(read_pfm((temp_dir() / "missing.pfm").string()), IoError);
}

TEST_CASE("depth pfm: invalid pixels round-trip as invalid") {
  const auto path = (temp_dir() / "d.pfm").string();
  DepthMap m(3, 3, 2.0, true);
  m.valid(1, 1) = 0;
  m.depth(1, 1) = 0.0;
  m.depth(0, 2) = 3.75;
  write_depth_pfm(path, m);
  const DepthMap back = read_depth_pfm(path);
  CHECK(back.depth == m.depth);
  CHECK(back.valid == m.valid);
}

TEST_CASE("cam: round-trips all 21 numbers at full precision") {
  const auto path = (temp_dir() / "a.cam").string();
  CameraFile cam;
  cam.extrinsic << 0.99875026039496628, -0.03997868712591883,
      0.03003602396084387, 0.12345678901234567, 0.04105926342287812,
      0.99851250721587858, -0.03617451039564709, -2.0,
      -0.02854522591529969, 0.03736507747229544, 0.99889393912458238, 0.5,
      0.0, 0.0, 0.0, 1.0;
  cam.intrinsic << 117.375, 0.0, 31.5, 0.0, 117.375, 31.5, 0.0, 0.0, 1.0;
  cam.depth_min = 1.5;
  cam.depth_interval = 0.0078125;
  cam.depth_count = 256;
  cam.depth_max = 3.5;
  write_cam(path, cam);
  const CameraFile back = read_cam(path);
  CHECK(back.extrinsic == cam.extrinsic);
  CHECK(back.intrinsic == cam.intrinsic);
  CHECK(back.depth_min == cam.depth_min);
  CHECK(back.depth_interval == cam.depth_interval);
  CHECK(back.depth_count == cam.depth_count);
  CHECK(back.depth_max == cam.depth_max);
}

TEST_CASE("cam: hand-written fixture parses to the expected matrices") {
  const auto path = write_text("fixture.cam",
                               "extrinsic\n"
                               "1 0 0 0.25\n"
                               "0 1 0 0\n"
                               "0 0 1 -1.5\n"
                               "0 0 0 1\n"
                               "\n"
                               "intrinsic\n"
                               "100 0 50\n"
                               "0 100 50\n"
                               "0 0 1\n"
                               "\n"
                               "0.5 0.037109375 256 10\n");
  const CameraFile cam = read_cam(path);
  CHECK(cam.extrinsic(0, 3) == 0.25);
  CHECK(cam.extrinsic(2, 3) == -1.5);
  CHECK(cam.extrinsic(1, 1) == 1.0);
  CHECK(cam.intrinsic(0, 0) == 100.0);
  CHECK(cam.intrinsic(0, 2) == 50.0);
  CHECK(cam.depth_min == 0.5);
  CHECK(cam.depth_interval == 0.037109375);
  CHECK(cam.depth_count == 256);
  CHECK(cam.depth_max == 10.0);
}

TEST_CASE("cam: missing depth line is malformed") {
  const auto path = write_text("bad.cam",
                               "extrinsic\n"
                               "1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n"
                               "\nintrinsic\n"
                               "100 0 50\n0 100 50\n0 0 1\n");
  CHECK_THROWS_AS(read_cam(path), MalformedCamFile);
}

TEST_CASE("view <-> camera file conversion is consistent") {
  CameraFile cam;
  cam.intrinsic << 100, 0, 50, 0, 100, 50, 0, 0, 1;
  cam.depth_min = 0.5;
  cam.depth_max = 10.0;
  const CalibratedView view =
      view_from_camera_file(cam, GridD(101, 101, 0.5));
  CHECK(view.intrinsics.fx == 100.0);
  CHECK(view.depth_min == 0.5);
  const CameraFile back = camera_file_from_view(view);
  CHECK(back.intrinsic == cam.intrinsic);
  CHECK(back.extrinsic == cam.extrinsic);
  CHECK(back.depth_max == cam.depth_max);
}

TEST_CASE("ply: float64 coordinates and uint8 colors round-trip") {
  const auto path = (temp_dir() / "a.ply").string();
  PointCloud cloud;
  cloud.points = {{0.1234567890123, -2.5, 3.0}, {1e-9, 1e9, -0.0}};
  cloud.colors = {{0.0, 0.5, 1.0}, {1.0, 0.25, 0.0}};
  cloud.view_ids = {0, 1};
  cloud.support = {2, 3};
  write_ply(path, cloud);
  const PointCloud back = read_ply(path);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.points[i] == cloud.points[i]);  // float64 payload, bit-exact
    for (int c = 0; c < 3; ++c) {
      // Colors are quantized to uint8 on write.
      CHECK(back.colors[i][c] ==
            doctest::Approx(cloud.colors[i][c]).epsilon(0.5 / 255));
    }
  }
}

TEST_CASE("report: flat key-value lines") {
  const std::string text =
      format_report({{"mae", 0.125}, {"error_ratio", 0.5}});
  CHECK(text == "mae 0.125\nerror_ratio 0.5\n");
}
