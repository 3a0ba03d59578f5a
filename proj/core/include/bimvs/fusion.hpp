#pragma once

#include <utility>
#include <vector>

#include "bimvs/depth_map.hpp"
#include "bimvs/errors.hpp"
#include "bimvs/geometry.hpp"

namespace bimvs {

struct FusionConfig {
  double max_reproj_px = 1.0;
  double max_rel_depth = 0.01;
  int min_consistent_views = 3;
  bool use_photometric = true;
  double min_ncc = 0.3;   // on a 5x5 window

  void validate() const;
};

// Fused points with per-point provenance.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> colors;      // rgb in [0, 1]
  std::vector<int> view_ids;     // reference view the point came from
  std::vector<int> support;      // consistent-view count

  std::size_t size() const { return points.size(); }
};

// Forward-backward reprojection check of every ref pixel against one
// source view. The source depth is looked up at the rounded warped pixel.
GridU8 geometric_consistency(const DepthMap& ref_depth,
                             const CalibratedView& ref,
                             const DepthMap& src_depth,
                             const CalibratedView& src,
                             const FusionConfig& config);

// Photo-geometric fusion: pixels consistent in at least
// min_consistent_views sources (NCC-gated when enabled) are emitted as the
// average of the consistent views' 3D estimates, colored from the
// reference image. Emission order is view-major, row-major.
PointCloud fuse(const std::vector<std::pair<CalibratedView, DepthMap>>& views,
                const FusionConfig& config, int threads = 1);

}  // namespace bimvs
