#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bimvs/depth_map.hpp"
#include "bimvs/fusion.hpp"
#include "bimvs/geometry.hpp"

namespace bimvs {

// Axis-aligned fronto-parallel rectangle in world coordinates at a fixed
// depth plane z = depth.
struct RectSpec {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  double depth = 0;
};

// Piecewise-planar scene: rectangles in front of an infinite background
// plane, observed by a lateral or ring camera rig looking down +z.
struct SceneSpec {
  int width = 0, height = 0;
  int num_views = 0;
  enum class Rig { kLateral, kRing } rig = Rig::kLateral;
  double rig_extent = 0.1;   // baseline step (lateral) or ring radius
  double depth_min = 0, depth_max = 0;
  double focal = 0;
  double background_depth = 0;
  std::vector<RectSpec> rects;
  std::uint64_t texture_seed = 1;
  double texture_scale = 0.12;    // world units of the coarse noise octave
  double surface_contrast = 0.0;  // base-intensity gap between surfaces

  void validate() const;   // throws InvalidSpec
};

// Line-oriented text format:
//   size W H
//   views N lateral|ring EXTENT
//   range DMIN DMAX
//   focal F
//   background DEPTH
//   rect XMIN YMIN XMAX YMAX DEPTH     (repeatable)
//   texture SEED [SCALE]
//   contrast GAP
// '#' starts a comment.
SceneSpec parse_scene_spec(const std::string& text);
SceneSpec load_scene_spec(const std::string& path);

struct SyntheticScene {
  std::vector<CalibratedView> views;       // procedural texture rendered in
  std::vector<GroundTruth> gt_depths;      // analytic plane-ray depths
  std::vector<BoundaryMask> gt_boundaries; // surface-id changes, per view
  PointCloud gt_cloud;                     // GT depth unprojected, all views
};

// Exact analytic rendering: per pixel the nearest surface along the ray
// wins (no anti-aliasing across depth edges); deterministic per seed.
SyntheticScene render_scene(const SceneSpec& spec);

// The procedural surface texture; exposed for the generator self-test.
double surface_texture(double x, double y, int surface_id,
                       const SceneSpec& spec);

}  // namespace bimvs
