#pragma once

#include <cmath>
#include <random>
#include <string>

#include "bimvs/geometry.hpp"
#include "bimvs/synth.hpp"

namespace bimvs::testing {

inline std::string scene_path(const std::string& name) {
  return std::string(BIMVS_SCENE_DIR) + "/" + name;
}

// Simple identity-pose view with a constant image, fx = fy, centered
// principal point.
inline CalibratedView make_view(int height, int width, double focal,
                                double depth_min = 0.5,
                                double depth_max = 10.0,
                                double intensity = 0.5) {
  CalibratedView view;
  view.image = GridD(height, width, intensity);
  view.intrinsics.fx = view.intrinsics.fy = focal;
  view.intrinsics.cx = (width - 1) / 2.0;
  view.intrinsics.cy = (height - 1) / 2.0;
  view.intrinsics.width = width;
  view.intrinsics.height = height;
  view.depth_min = depth_min;
  view.depth_max = depth_max;
  return view;
}

inline Mat3 rotation_from_axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

// Deterministic random rigid pose with a bounded rotation so test frusta
// keep overlapping.
inline Pose random_pose(std::mt19937& rng, double max_angle = 0.3,
                        double max_offset = 0.5) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec3 axis(u(rng), u(rng), u(rng));
  const Mat3 r = rotation_from_axis_angle(
      axis.norm() > 1e-9 ? axis : Vec3(0, 0, 1), max_angle * u(rng));
  const Vec3 t(max_offset * u(rng), max_offset * u(rng), max_offset * u(rng));
  return Pose(r, t);
}

}  // namespace bimvs::testing
