#include "bimvs/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bimvs {

namespace {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail_open(const std::string& path) {
  throw IoError("cannot open file: " + path);
}

}  // namespace

void write_pfm(const std::string& path, const GridD& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_open(path);
  out << "Pf\n" << grid.width() << " " << grid.height() << "\n-1.0\n";
  std::vector<float> row(grid.width());
  for (int y = grid.height() - 1; y >= 0; --y) {  // bottom-up
    for (int x = 0; x < grid.width(); ++x) {
      row[x] = static_cast<float>(grid(y, x));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              row.size() * sizeof(float));
  }
  if (!out) throw IoError("write failed: " + path);
}

GridD read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_open(path);
  std::string magic;
  in >> magic;
  if (magic == "PF") {
    throw MalformedHeader("color PFM is not supported: " + path);
  }
  if (magic != "Pf") throw MalformedHeader("not a PFM file: " + path);
  int width = 0, height = 0;
  double scale = 0;
  in >> width >> height >> scale;
  if (!in || width <= 0 || height <= 0 || scale == 0) {
    throw MalformedHeader("bad PFM header: " + path);
  }
  if (scale > 0) {
    throw MalformedHeader("big-endian PFM is not supported: " + path);
  }
  in.get();  // single whitespace after the scale
  GridD grid(height, width);
  std::vector<float> row(width);
  for (int y = height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()), row.size() * sizeof(float));
    if (!in) throw UnexpectedEof();
    for (int x = 0; x < width; ++x) grid(y, x) = row[x];
  }
  return grid;
}

void write_depth_pfm(const std::string& path, const DepthMap& map) {
  GridD grid = map.depth;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!map.valid[i]) grid[i] = 0.0;
  }
  write_pfm(path, grid);
}

DepthMap read_depth_pfm(const std::string& path) {
  const GridD grid = read_pfm(path);
  DepthMap map(grid.height(), grid.width());
  map.depth = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    map.valid[i] = grid[i] > 0 ? 1 : 0;
  }
  return map;
}

void write_cam(const std::string& path, const CameraFile& cam) {
  std::ofstream out(path);
  if (!out) fail_open(path);
  out << "extrinsic\n";
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      out << format_g17(cam.extrinsic(r, c)) << (c == 3 ? "\n" : " ");
    }
  }
  out << "\nintrinsic\n";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out << format_g17(cam.intrinsic(r, c)) << (c == 2 ? "\n" : " ");
    }
  }
  out << "\n" << format_g17(cam.depth_min) << " "
      << format_g17(cam.depth_interval) << " " << cam.depth_count << " "
      << format_g17(cam.depth_max) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

CameraFile read_cam(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_open(path);
  std::string tag;
  CameraFile cam;
  in >> tag;
  if (tag != "extrinsic") throw MalformedCamFile("missing extrinsic: " + path);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (!(in >> cam.extrinsic(r, c))) {
        throw MalformedCamFile("truncated extrinsic: " + path);
      }
    }
  }
  in >> tag;
  if (tag != "intrinsic") throw MalformedCamFile("missing intrinsic: " + path);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (!(in >> cam.intrinsic(r, c))) {
        throw MalformedCamFile("truncated intrinsic: " + path);
      }
    }
  }
  double count = 0;
  if (!(in >> cam.depth_min >> cam.depth_interval >> count >> cam.depth_max)) {
    throw MalformedCamFile("missing depth line: " + path);
  }
  cam.depth_count = static_cast<int>(count);
  return cam;
}

CameraFile camera_file_from_view(const CalibratedView& view) {
  CameraFile cam;
  cam.extrinsic.setIdentity();
  cam.extrinsic.block<3, 3>(0, 0) = view.pose.rotation();
  cam.extrinsic.block<3, 1>(0, 3) = view.pose.translation();
  cam.intrinsic = view.intrinsics.matrix();
  cam.depth_min = view.depth_min;
  cam.depth_max = view.depth_max;
  cam.depth_count = 192;
  cam.depth_interval = (view.depth_max - view.depth_min) / cam.depth_count;
  return cam;
}

CalibratedView view_from_camera_file(const CameraFile& cam, GridD image) {
  CalibratedView view;
  view.intrinsics.fx = cam.intrinsic(0, 0);
  view.intrinsics.fy = cam.intrinsic(1, 1);
  view.intrinsics.cx = cam.intrinsic(0, 2);
  view.intrinsics.cy = cam.intrinsic(1, 2);
  view.intrinsics.width = image.width();
  view.intrinsics.height = image.height();
  view.pose = Pose(cam.extrinsic.block<3, 3>(0, 0),
                   cam.extrinsic.block<3, 1>(0, 3));
  view.depth_min = cam.depth_min;
  view.depth_max = cam.depth_max;
  view.image = std::move(image);
  view.validate();
  return view;
}

void write_ply(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_open(path);
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << cloud.points.size() << "\n"
      << "property float64 x\nproperty float64 y\nproperty float64 z\n"
      << "property uint8 red\nproperty uint8 green\nproperty uint8 blue\n"
      << "end_header\n";
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    double xyz[3] = {cloud.points[i].x(), cloud.points[i].y(),
                     cloud.points[i].z()};
    out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    unsigned char rgb[3];
    for (int c = 0; c < 3; ++c) {
      rgb[c] = static_cast<unsigned char>(
          std::lround(std::clamp(cloud.colors[i][c], 0.0, 1.0) * 255.0));
    }
    out.write(reinterpret_cast<const char*>(rgb), sizeof(rgb));
  }
  if (!out) throw IoError("write failed: " + path);
}

PointCloud read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_open(path);
  std::string line;
  if (!std::getline(in, line) || line != "ply") {
    throw MalformedHeader("not a PLY file: " + path);
  }
  std::size_t count = 0;
  std::vector<std::string> props;
  bool binary_le = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      binary_le = (fmt == "binary_little_endian");
    } else if (word == "element") {
      std::string what;
      ls >> what >> count;
      if (what != "vertex") {
        throw MalformedHeader("unsupported PLY element: " + what);
      }
    } else if (word == "property") {
      std::string type, name;
      ls >> type >> name;
      props.push_back(type + ":" + name);
    } else if (word == "end_header") {
      break;
    } else if (word == "comment") {
      continue;
    }
  }
  if (!binary_le) {
    throw MalformedHeader("only binary little-endian PLY is supported");
  }
  const std::vector<std::string> expected = {
      "float64:x", "float64:y", "float64:z",
      "uint8:red", "uint8:green", "uint8:blue"};
  if (props != expected) {
    throw MalformedHeader("unsupported PLY vertex layout: " + path);
  }
  PointCloud cloud;
  cloud.points.reserve(count);
  cloud.colors.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double xyz[3];
    unsigned char rgb[3];
    in.read(reinterpret_cast<char*>(xyz), sizeof(xyz));
    in.read(reinterpret_cast<char*>(rgb), sizeof(rgb));
    if (!in) throw UnexpectedEof();
    cloud.points.emplace_back(xyz[0], xyz[1], xyz[2]);
    cloud.colors.emplace_back(rgb[0] / 255.0, rgb[1] / 255.0, rgb[2] / 255.0);
    cloud.view_ids.push_back(0);
    cloud.support.push_back(0);
  }
  return cloud;
}

void write_png_gray(const std::string& path, const GridD& grid) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) fail_open(path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(fp);
    throw IoError("png write failed: " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, grid.width(), grid.height(), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<unsigned char> row(grid.width());
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      row[x] = static_cast<unsigned char>(
          std::lround(std::clamp(grid(y, x), 0.0, 1.0) * 255.0));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) fail_open(path);
  out << "step,total,l_gt,l_ed,l_sm,l_bi\n";
  for (const auto& row : trace) {
    out << static_cast<long long>(row[0]);
    for (int c = 1; c < 6; ++c) out << "," << format_g17(row[c]);
    out << "\n";
  }
}

std::string format_report(
    const std::vector<std::pair<std::string, double>>& entries) {
  std::string text;
  for (const auto& [key, value] : entries) {
    text += key + " " + format_g17(value) + "\n";
  }
  return text;
}

void write_report(const std::string& path,
                  const std::vector<std::pair<std::string, double>>& entries) {
  std::ofstream out(path);
  if (!out) fail_open(path);
  out << format_report(entries);
}

}  // namespace bimvs
