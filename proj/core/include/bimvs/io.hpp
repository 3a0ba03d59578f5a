#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bimvs/depth_map.hpp"
#include "bimvs/errors.hpp"
#include "bimvs/fusion.hpp"
#include "bimvs/geometry.hpp"
#include "bimvs/refine.hpp"

namespace bimvs {

// PFM, grayscale "Pf" variant only, little-endian (negative scale),
// rows stored bottom-up. Payload is float32.
void write_pfm(const std::string& path, const GridD& grid);
GridD read_pfm(const std::string& path);

// Depth maps serialize as PFM with 0 marking invalid pixels
// (valid depths are strictly positive).
void write_depth_pfm(const std::string& path, const DepthMap& map);
DepthMap read_depth_pfm(const std::string& path);

// MVS camera text file: "extrinsic" + 4x4 world-to-camera matrix,
// "intrinsic" + 3x3 K, then "depth_min depth_interval depth_count
// depth_max" (interval and count are parsed but unused by PatchMatch).
struct CameraFile {
  Eigen::Matrix4d extrinsic = Eigen::Matrix4d::Identity();
  Mat3 intrinsic = Mat3::Identity();
  double depth_min = 0;
  double depth_interval = 0;
  int depth_count = 0;
  double depth_max = 0;
};
void write_cam(const std::string& path, const CameraFile& cam);
CameraFile read_cam(const std::string& path);

CameraFile camera_file_from_view(const CalibratedView& view);
// Combines a camera file with an intensity image into a view.
CalibratedView view_from_camera_file(const CameraFile& cam, GridD image);

// Binary little-endian PLY with float64 x/y/z and uint8 red/green/blue.
void write_ply(const std::string& path, const PointCloud& cloud);
PointCloud read_ply(const std::string& path);

// 8-bit grayscale PNG; values clamped to [0, 1] and scaled to 0-255.
void write_png_gray(const std::string& path, const GridD& grid);

// CSV loss trace: step,total,l_gt,l_ed,l_sm,l_bi.
void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& trace);

// Flat key-value report, one "key value" line each, 17 significant digits.
void write_report(const std::string& path,
                  const std::vector<std::pair<std::string, double>>& entries);
std::string format_report(
    const std::vector<std::pair<std::string, double>>& entries);

}  // namespace bimvs
