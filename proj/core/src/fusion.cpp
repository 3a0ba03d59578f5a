#include "bimvs/fusion.hpp"

#include <cmath>

#include "bimvs/parallel.hpp"
#include "bimvs/patchmatch.hpp"

namespace bimvs {

void FusionConfig::validate() const {
  if (!(max_reproj_px > 0) || !(max_rel_depth > 0)) {
    throw InvalidParameter("fusion tolerances must be positive");
  }
  if (min_consistent_views < 1) {
    throw InvalidParameter("min_consistent_views must be >= 1");
  }
}

namespace {

struct ConsistencyHit {
  bool ok = false;
  Vec3 src_point = Vec3::Zero();  // 3D estimate from the source view
};

ConsistencyHit check_pixel(int x, int y, const DepthMap& ref_depth,
                           const CalibratedView& ref,
                           const DepthMap& src_depth,
                           const CalibratedView& src,
                           const FusionConfig& config) {
  ConsistencyHit hit;
  if (!ref_depth.is_valid(y, x)) return hit;
  const double d = ref_depth.depth(y, x);
  if (!(d > 0)) return hit;

  const Vec3 world = unproject(Vec2(x, y), d, ref);
  Projection fwd;
  // Bounds are enforced on the rounded lookup below rather than on
  // fwd.in_bounds, which can reject border pixels on round-off alone.
  if (!try_project(world, src, &fwd)) return hit;

  const int qx = static_cast<int>(std::lround(fwd.pixel.x()));
  const int qy = static_cast<int>(std::lround(fwd.pixel.y()));
  if (!src_depth.depth.contains(qy, qx) || !src_depth.is_valid(qy, qx)) {
    return hit;
  }
  const double ds = src_depth.depth(qy, qx);
  if (!(ds > 0)) return hit;

  const Vec3 back_world = unproject(Vec2(qx, qy), ds, src);
  Projection back;
  if (!try_project(back_world, ref, &back)) return hit;
  const double reproj = (back.pixel - Vec2(x, y)).norm();
  if (reproj > config.max_reproj_px) return hit;
  if (std::abs(back.depth - d) / d > config.max_rel_depth) return hit;

  hit.ok = true;
  hit.src_point = back_world;
  return hit;
}

}  // namespace

GridU8 geometric_consistency(const DepthMap& ref_depth,
                             const CalibratedView& ref,
                             const DepthMap& src_depth,
                             const CalibratedView& src,
                             const FusionConfig& config) {
  config.validate();
  if (ref_depth.height() != ref.intrinsics.height ||
      ref_depth.width() != ref.intrinsics.width ||
      src_depth.height() != src.intrinsics.height ||
      src_depth.width() != src.intrinsics.width) {
    throw DimensionMismatch("depth maps must match their views");
  }
  GridU8 out(ref_depth.height(), ref_depth.width(), 0);
  for (int y = 0; y < ref_depth.height(); ++y) {
    for (int x = 0; x < ref_depth.width(); ++x) {
      out(y, x) =
          check_pixel(x, y, ref_depth, ref, src_depth, src, config).ok ? 1 : 0;
    }
  }
  return out;
}

PointCloud fuse(const std::vector<std::pair<CalibratedView, DepthMap>>& views,
                const FusionConfig& config, int threads) {
  config.validate();
  if (static_cast<int>(views.size()) < config.min_consistent_views + 1) {
    throw TooFewViews();
  }

  PointCloud cloud;
  const int num_views = static_cast<int>(views.size());

  for (int r = 0; r < num_views; ++r) {
    const auto& [ref, ref_depth] = views[r];
    const int h = ref_depth.height();
    const int w = ref_depth.width();

    std::vector<HomographyWarper> warpers;
    std::vector<const GridD*> src_images;
    for (int s = 0; s < num_views; ++s) {
      warpers.emplace_back(ref, views[s].first);
      src_images.push_back(&views[s].first.image);
    }

    // Per-pixel accumulation buffers; filled in parallel, emitted in a
    // sequential row-major pass so ordering is thread-count independent.
    Grid<int> counts(h, w, 0);
    Grid<Vec3> sums(h, w, Vec3::Zero());

    parallel_for(static_cast<std::int64_t>(h) * w, threads,
                 [&](std::int64_t i) {
                   const int y = static_cast<int>(i / w);
                   const int x = static_cast<int>(i % w);
                   if (!ref_depth.is_valid(y, x)) return;
                   Vec3 sum = unproject(
                       Vec2(x, y), ref_depth.depth(y, x), ref);
                   int n = 0;
                   for (int s = 0; s < num_views; ++s) {
                     if (s == r) continue;
                     const auto& [src, src_depth] = views[s];
                     const ConsistencyHit hit = check_pixel(
                         x, y, ref_depth, ref, src_depth, src, config);
                     if (!hit.ok) continue;
                     if (config.use_photometric) {
                       const std::vector<HomographyWarper> wp{warpers[s]};
                       const std::vector<const GridD*> im{src_images[s]};
                       const double cost =
                           ncc_cost(ref, wp, im, x, y,
                                    ref_depth.depth(y, x), 5, nullptr);
                       if (1.0 - cost < config.min_ncc) continue;
                     }
                     sum += hit.src_point;
                     ++n;
                   }
                   counts(y, x) = n;
                   sums(y, x) = sum;
                 });

    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int n = counts(y, x);
        if (n < config.min_consistent_views) continue;
        const Vec3 point = sums(y, x) / (n + 1);
        const double intensity = ref.image(y, x);
        cloud.points.push_back(point);
        cloud.colors.push_back(Vec3(intensity, intensity, intensity));
        cloud.view_ids.push_back(r);
        cloud.support.push_back(n);
      }
    }
  }
  return cloud;
}

}  // namespace bimvs
