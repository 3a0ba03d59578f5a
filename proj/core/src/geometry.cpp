#include "bimvs/geometry.hpp"

#include <cmath>

namespace bimvs {

namespace {
constexpr double kOrthoTol = 1e-9;
}

void Intrinsics::validate() const {
  if (!(fx > 0) || !(fy > 0)) {
    throw InvalidParameter("focal lengths must be positive");
  }
  if (!(cx >= 0 && cx < width) || !(cy >= 0 && cy < height)) {
    throw InvalidParameter("principal point outside the image");
  }
}

Mat3 Intrinsics::matrix() const {
  Mat3 k;
  k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
  return k;
}

Intrinsics Intrinsics::downsampled(int factor) const {
  // x_coarse = (x_fine + 0.5) / factor - 0.5 keeps integer pixel centers.
  Intrinsics out;
  out.fx = fx / factor;
  out.fy = fy / factor;
  out.cx = (cx + 0.5) / factor - 0.5;
  out.cy = (cy + 0.5) / factor - 0.5;
  out.width = width / factor;
  out.height = height / factor;
  return out;
}

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > kOrthoTol) {
    throw InvalidParameter("rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > kOrthoTol) {
    throw InvalidParameter("rotation determinant is not +1");
  }
}

void CalibratedView::validate() const {
  intrinsics.validate();
  if (!(depth_min > 0) || !(depth_max > depth_min)) {
    throw InvalidParameter("depth range must satisfy 0 < depth_min < depth_max");
  }
  if (!image.empty() &&
      (image.width() != intrinsics.width || image.height() != intrinsics.height)) {
    throw DimensionMismatch("image dimensions do not match intrinsics");
  }
}

bool try_project(const Vec3& point, const CalibratedView& view,
                 Projection* out) {
  const Vec3 cam = view.pose.to_camera(point);
  if (cam.z() <= 0) return false;
  const double x = view.intrinsics.fx * cam.x() / cam.z() + view.intrinsics.cx;
  const double y = view.intrinsics.fy * cam.y() / cam.z() + view.intrinsics.cy;
  out->pixel = Vec2(x, y);
  out->depth = cam.z();
  out->in_bounds = x >= 0 && x <= view.intrinsics.width - 1 &&
                   y >= 0 && y <= view.intrinsics.height - 1;
  return true;
}

Projection project(const Vec3& point, const CalibratedView& view) {
  Projection out;
  if (!try_project(point, view, &out)) throw BehindCamera();
  return out;
}

Vec3 unproject(const Vec2& pixel, double depth, const CalibratedView& view) {
  if (!(depth > 0)) throw NonPositiveDepth();
  const Vec3 cam(depth * (pixel.x() - view.intrinsics.cx) / view.intrinsics.fx,
                 depth * (pixel.y() - view.intrinsics.cy) / view.intrinsics.fy,
                 depth);
  return view.pose.to_world(cam);
}

HomographyWarper::HomographyWarper(const CalibratedView& ref,
                                   const CalibratedView& src)
    : src_width_(src.intrinsics.width), src_height_(src.intrinsics.height) {
  const Mat3 rel_r = src.pose.rotation() * ref.pose.rotation().transpose();
  const Vec3 rel_t = src.pose.translation() - rel_r * ref.pose.translation();
  const Mat3 k_ref_inv = ref.intrinsics.matrix().inverse();
  const Mat3 k_src = src.intrinsics.matrix();
  const Vec3 n(0, 0, 1);  // fronto-parallel plane normal in the ref frame
  a_ = k_src * rel_r * k_ref_inv;
  b_ = k_src * (rel_t * n.transpose()) * k_ref_inv;
}

bool HomographyWarper::warp(double px, double py, double depth,
                            WarpResult* out) const {
  const Vec3 p(px, py, 1.0);
  const Vec3 q = a_ * p + b_ * p / depth;
  if (q.z() <= 0) return false;
  // The last row of K is (0,0,1), so q.z is the source camera-frame depth
  // of the warped point up to the plane scale: X_src = depth * (A+B/d) p.
  out->pixel = Vec2(q.x() / q.z(), q.y() / q.z());
  out->depth = depth * q.z();
  out->in_bounds = out->pixel.x() >= 0 && out->pixel.x() <= src_width_ - 1 &&
                   out->pixel.y() >= 0 && out->pixel.y() <= src_height_ - 1;
  return true;
}

bool try_homography_warp(const Vec2& pixel, double depth,
                         const CalibratedView& ref, const CalibratedView& src,
                         WarpResult* out) {
  const HomographyWarper warper(ref, src);
  return warper.warp(pixel.x(), pixel.y(), depth, out);
}

WarpResult homography_warp(const Vec2& pixel, double depth,
                           const CalibratedView& ref,
                           const CalibratedView& src) {
  WarpResult out;
  if (!try_homography_warp(pixel, depth, ref, src, &out)) throw BehindCamera();
  return out;
}

bool bilinear_sample(const GridD& image, double x, double y, double* value) {
  if (x < 0 || y < 0 || x > image.width() - 1 || y > image.height() - 1) {
    return false;
  }
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  if (x0 == image.width() - 1) --x0;   // x == W-1 edge
  if (y0 == image.height() - 1) --y0;
  if (image.width() == 1) x0 = 0;
  if (image.height() == 1) y0 = 0;
  const int x1 = std::min(x0 + 1, image.width() - 1);
  const int y1 = std::min(y0 + 1, image.height() - 1);
  const double ax = x - x0;
  const double ay = y - y0;
  *value = (1 - ay) * ((1 - ax) * image(y0, x0) + ax * image(y0, x1)) +
           ay * ((1 - ax) * image(y1, x0) + ax * image(y1, x1));
  return true;
}

}  // namespace bimvs
