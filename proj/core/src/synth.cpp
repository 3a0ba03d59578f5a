#include "bimvs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bimvs/errors.hpp"
#include "bimvs/parallel.hpp"

namespace bimvs {

namespace {

double lattice_value(std::int64_t ix, std::int64_t iy, std::uint64_t seed) {
  std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(ix));
  h = hash_combine(h, static_cast<std::uint64_t>(iy));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Smoothly interpolated lattice noise in [0, 1].
double value_noise(double x, double y, std::uint64_t seed) {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const double tx = smoothstep(x - fx);
  const double ty = smoothstep(y - fy);
  const double v00 = lattice_value(ix, iy, seed);
  const double v10 = lattice_value(ix + 1, iy, seed);
  const double v01 = lattice_value(ix, iy + 1, seed);
  const double v11 = lattice_value(ix + 1, iy + 1, seed);
  const double top = v00 + (v10 - v00) * tx;
  const double bot = v01 + (v11 - v01) * tx;
  return top + (bot - top) * ty;
}

[[noreturn]] void bad_spec(const std::string& what) { throw InvalidSpec(what); }

}  // namespace

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0) bad_spec("size must be positive");
  if (num_views < 2) bad_spec("at least two views are required");
  if (!(rig_extent > 0)) bad_spec("rig extent must be positive");
  if (!(depth_min > 0) || !(depth_max > depth_min)) {
    bad_spec("depth range must satisfy 0 < min < max");
  }
  if (!(focal > 0)) bad_spec("focal length must be positive");
  if (!(background_depth > depth_min) || !(background_depth <= depth_max)) {
    bad_spec("background depth must lie inside the depth range");
  }
  for (const RectSpec& r : rects) {
    if (!(r.xmin < r.xmax) || !(r.ymin < r.ymax)) {
      bad_spec("rect extents must be non-empty");
    }
    if (!(r.depth >= depth_min) || !(r.depth < background_depth)) {
      bad_spec("rect depth must lie in [depth_min, background)");
    }
  }
  if (!(texture_scale > 0)) bad_spec("texture scale must be positive");
  if (surface_contrast < 0 || surface_contrast > 0.9) {
    bad_spec("surface contrast must lie in [0, 0.9]");
  }
}

SceneSpec parse_scene_spec(const std::string& text) {
  SceneSpec spec;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_size = false, saw_views = false, saw_range = false;
  bool saw_focal = false, saw_background = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;

    const auto fail = [&](const std::string& what) {
      bad_spec("line " + std::to_string(line_no) + ": " + what);
    };
    if (key == "size") {
      if (!(ls >> spec.width >> spec.height)) fail("expected: size W H");
      saw_size = true;
    } else if (key == "views") {
      std::string rig;
      if (!(ls >> spec.num_views >> rig >> spec.rig_extent)) {
        fail("expected: views N lateral|ring EXTENT");
      }
      if (rig == "lateral") {
        spec.rig = SceneSpec::Rig::kLateral;
      } else if (rig == "ring") {
        spec.rig = SceneSpec::Rig::kRing;
      } else {
        fail("unknown rig type: " + rig);
      }
      saw_views = true;
    } else if (key == "range") {
      if (!(ls >> spec.depth_min >> spec.depth_max)) {
        fail("expected: range DMIN DMAX");
      }
      saw_range = true;
    } else if (key == "focal") {
      if (!(ls >> spec.focal)) fail("expected: focal F");
      saw_focal = true;
    } else if (key == "background") {
      if (!(ls >> spec.background_depth)) fail("expected: background DEPTH");
      saw_background = true;
    } else if (key == "rect") {
      RectSpec r;
      if (!(ls >> r.xmin >> r.ymin >> r.xmax >> r.ymax >> r.depth)) {
        fail("expected: rect XMIN YMIN XMAX YMAX DEPTH");
      }
      spec.rects.push_back(r);
    } else if (key == "texture") {
      if (!(ls >> spec.texture_seed)) fail("expected: texture SEED [SCALE]");
      double scale = 0;
      if (ls >> scale) spec.texture_scale = scale;
    } else if (key == "contrast") {
      if (!(ls >> spec.surface_contrast)) fail("expected: contrast GAP");
    } else {
      fail("unknown keyword: " + key);
    }
  }
  if (!saw_size) bad_spec("missing size line");
  if (!saw_views) bad_spec("missing views line");
  if (!saw_range) bad_spec("missing range line");
  if (!saw_focal) bad_spec("missing focal line");
  if (!saw_background) bad_spec("missing background line");
  spec.validate();
  return spec;
}

SceneSpec load_scene_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene_spec(buf.str());
}

double surface_texture(double x, double y, int surface_id,
                       const SceneSpec& spec) {
  const std::uint64_t base = hash_combine(
      mix64(spec.texture_seed), static_cast<std::uint64_t>(surface_id + 1));
  // Three smooth octaves; everything is bandlimited so that resampling the
  // rendered images stays accurate to a small fraction of a pixel.
  const double s0 = spec.texture_scale;
  const double s1 = spec.texture_scale * 0.31;
  const double s2 = spec.texture_scale * 0.145;
  const double v =
      0.45 * value_noise(x / s0, y / s0, hash_combine(base, 1)) +
      0.35 * value_noise(x / s1, y / s1, hash_combine(base, 2)) +
      0.20 * value_noise(x / s2, y / s2, hash_combine(base, 3));
  // Alternating per-surface base level. Nonzero contrast puts an intensity
  // edge on every depth discontinuity against the background, which guided
  // upsampling needs; it also makes occlusion regions harder to match, so
  // matching-accuracy scenes keep it at 0.
  const double half = 0.5 * spec.surface_contrast;
  const double level = 0.5 + (surface_id % 2 == 0 ? -half : half);
  return std::clamp(level + 0.55 * (v - 0.5), 0.02, 0.98);
}

namespace {

Pose rig_pose(const SceneSpec& spec, int view_index) {
  if (spec.rig == SceneSpec::Rig::kLateral) {
    const double offset =
        (view_index - (spec.num_views - 1) / 2.0) * spec.rig_extent;
    const Vec3 center(offset, 0.0, 0.0);
    return Pose(Mat3::Identity(), -center);
  }
  // Ring rig: centers on a circle in the z = 0 plane, all aimed at a
  // target on the optical axis mid-range.
  const double phi = 2.0 * M_PI * view_index / spec.num_views;
  const Vec3 center(spec.rig_extent * std::cos(phi),
                    spec.rig_extent * std::sin(phi), 0.0);
  const Vec3 target(0.0, 0.0, 0.5 * (spec.depth_min + spec.depth_max));
  const Vec3 z = (target - center).normalized();
  Vec3 x = Vec3(0.0, 1.0, 0.0).cross(z);
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 rot;
  rot.row(0) = x.transpose();
  rot.row(1) = y.transpose();
  rot.row(2) = z.transpose();
  return Pose(rot, -(rot * center));
}

}  // namespace

SyntheticScene render_scene(const SceneSpec& spec) {
  spec.validate();
  SyntheticScene scene;
  scene.views.reserve(spec.num_views);
  scene.gt_depths.reserve(spec.num_views);
  scene.gt_boundaries.reserve(spec.num_views);

  Intrinsics intr;
  intr.fx = intr.fy = spec.focal;
  intr.cx = (spec.width - 1) / 2.0;
  intr.cy = (spec.height - 1) / 2.0;
  intr.width = spec.width;
  intr.height = spec.height;

  for (int v = 0; v < spec.num_views; ++v) {
    CalibratedView view;
    view.intrinsics = intr;
    view.pose = rig_pose(spec, v);
    view.depth_min = spec.depth_min;
    view.depth_max = spec.depth_max;
    view.image = GridD(spec.height, spec.width, 0.5);

    GroundTruth gt(spec.height, spec.width);
    Grid<int> surface(spec.height, spec.width, -1);

    const Vec3 center = view.pose.center();
    const Mat3 rot_t = view.pose.rotation().transpose();
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        // Unit-z camera-frame direction: the camera depth of a hit at ray
        // parameter t is exactly t.
        const Vec3 dir_cam((x - intr.cx) / intr.fx, (y - intr.cy) / intr.fy,
                           1.0);
        const Vec3 dir = rot_t * dir_cam;

        double best_t = 0;
        int best_id = -1;
        Vec3 best_hit = Vec3::Zero();
        const auto try_plane = [&](double plane_z, int id, const RectSpec* r) {
          if (std::abs(dir.z()) < 1e-300) return;
          const double t = (plane_z - center.z()) / dir.z();
          if (t <= 0) return;
          const Vec3 hit = center + t * dir;
          if (r != nullptr && (hit.x() < r->xmin || hit.x() > r->xmax ||
                               hit.y() < r->ymin || hit.y() > r->ymax)) {
            return;
          }
          if (best_id < 0 || t < best_t) {
            best_t = t;
            best_id = id;
            best_hit = hit;
          }
        };
        try_plane(spec.background_depth, 0, nullptr);
        for (std::size_t i = 0; i < spec.rects.size(); ++i) {
          try_plane(spec.rects[i].depth, static_cast<int>(i) + 1,
                    &spec.rects[i]);
        }
        if (best_id < 0) continue;   // behind the camera; pixel stays invalid
        gt.depth(y, x) = best_t;
        gt.valid(y, x) = 1;
        surface(y, x) = best_id;
        view.image(y, x) =
            surface_texture(best_hit.x(), best_hit.y(), best_id, spec);
      }
    }
    view.validate();

    BoundaryMask boundary(spec.height, spec.width, 0);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const int id = surface(y, x);
        const auto differs = [&](int ny, int nx) {
          return boundary.contains(ny, nx) && surface(ny, nx) != id;
        };
        if (differs(y - 1, x) || differs(y + 1, x) || differs(y, x - 1) ||
            differs(y, x + 1)) {
          boundary(y, x) = 1;
        }
      }
    }

    scene.views.push_back(std::move(view));
    scene.gt_depths.push_back(std::move(gt));
    scene.gt_boundaries.push_back(std::move(boundary));
  }

  // Surface samples for cloud metrics: only points observed by at least
  // two views count, so completeness measures reconstructible surface.
  for (int v = 0; v < spec.num_views; ++v) {
    const CalibratedView& view = scene.views[v];
    const GroundTruth& gt = scene.gt_depths[v];
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        if (!gt.is_valid(y, x)) continue;
        const Vec3 p = unproject(Vec2(x, y), gt.depth(y, x), view);
        int seen_by = 1;
        for (int u = 0; u < spec.num_views && seen_by < 2; ++u) {
          if (u == v) continue;
          Projection proj;
          if (!try_project(p, scene.views[u], &proj) || !proj.in_bounds) {
            continue;
          }
          const int px = static_cast<int>(std::lround(proj.pixel.x()));
          const int py = static_cast<int>(std::lround(proj.pixel.y()));
          const GroundTruth& gu = scene.gt_depths[u];
          if (!gu.depth.contains(py, px) || !gu.is_valid(py, px)) continue;
          if (std::abs(proj.depth - gu.depth(py, px)) <=
              0.01 * gu.depth(py, px)) {
            ++seen_by;
          }
        }
        if (seen_by < 2) continue;
        scene.gt_cloud.points.push_back(p);
        const double c = view.image(y, x);
        scene.gt_cloud.colors.emplace_back(c, c, c);
        scene.gt_cloud.view_ids.push_back(v);
        scene.gt_cloud.support.push_back(seen_by);
      }
    }
  }
  return scene;
}

}  // namespace bimvs
