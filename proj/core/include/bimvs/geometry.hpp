#pragma once

#include <Eigen/Dense>

#include "bimvs/errors.hpp"
#include "bimvs/grid.hpp"

namespace bimvs {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Pinhole intrinsics. Pixel centers sit at integer coordinates with
// (0, 0) the top-left pixel center.
struct Intrinsics {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  int width = 0, height = 0;

  void validate() const;
  Mat3 matrix() const;

  // Intrinsics of the same camera after downsampling by an integer factor,
  // keeping pixel centers at integers at every scale.
  Intrinsics downsampled(int factor) const;
};

// World-to-camera rigid transform. Orthonormality is checked at
// construction; downstream code assumes it.
class Pose {
 public:
  Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  Pose(const Mat3& rotation, const Vec3& translation);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 to_camera(const Vec3& world) const {
    return rotation_ * world + translation_;
  }
  Vec3 to_world(const Vec3& camera) const {
    return rotation_.transpose() * (camera - translation_);
  }
  Vec3 center() const { return -(rotation_.transpose() * translation_); }

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

// One calibrated input view: intensity image in [0,1] plus camera.
struct CalibratedView {
  GridD image;
  Intrinsics intrinsics;
  Pose pose;
  double depth_min = 0;
  double depth_max = 0;

  void validate() const;
  double depth_range() const { return depth_max - depth_min; }
};

struct Projection {
  Vec2 pixel;
  double depth = 0;   // camera-frame z
  bool in_bounds = false;
};

// Perspective projection; throws BehindCamera when camera-frame z <= 0.
Projection project(const Vec3& point, const CalibratedView& view);
// Non-throwing variant for inner loops; returns false when behind camera.
bool try_project(const Vec3& point, const CalibratedView& view,
                 Projection* out);

// Inverse of project; throws NonPositiveDepth.
Vec3 unproject(const Vec2& pixel, double depth, const CalibratedView& view);

struct WarpResult {
  Vec2 pixel;
  double depth = 0;   // depth in the source camera frame
  bool in_bounds = false;
};

// Plane-induced homography for the fronto-parallel plane at the given
// reference depth: H = K_src (R_rel + t_rel n^T / d) K_ref^-1 with
// n = (0,0,1) in the reference camera frame. Independent code path from
// project/unproject. Throws BehindCamera when the warped point has
// non-positive source depth.
WarpResult homography_warp(const Vec2& pixel, double depth,
                           const CalibratedView& ref,
                           const CalibratedView& src);
bool try_homography_warp(const Vec2& pixel, double depth,
                         const CalibratedView& ref, const CalibratedView& src,
                         WarpResult* out);

// Precomputed relative homography pieces for warping many pixels at one
// depth hypothesis between a fixed view pair.
class HomographyWarper {
 public:
  HomographyWarper(const CalibratedView& ref, const CalibratedView& src);
  // Returns false when behind the source camera.
  bool warp(double px, double py, double depth, WarpResult* out) const;

 private:
  Mat3 a_;        // K_src R_rel K_ref^-1
  Mat3 b_;        // K_src t_rel n^T K_ref^-1
  int src_width_, src_height_;
};

// Bilinear sample with pixel centers at integer coordinates. Returns false
// when (x, y) is outside [0, W-1] x [0, H-1].
bool bilinear_sample(const GridD& image, double x, double y, double* value);

}  // namespace bimvs
