#include "bimvs/patchmatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bimvs/parallel.hpp"

namespace bimvs {

void PatchMatchConfig::validate() const {
  if (levels < 1) throw InvalidParameter("levels must be >= 1");
  if (window < 3 || window % 2 == 0) {
    throw InvalidParameter("window must be odd and >= 3");
  }
  if (hypotheses_per_pixel < 2) {
    throw InvalidParameter("hypotheses_per_pixel must be >= 2");
  }
  if (iterations_per_level < 1) {
    throw InvalidParameter("iterations_per_level must be >= 1");
  }
}

namespace {
// Stream tags so init / perturbation draws never collide.
constexpr std::uint64_t kInitStream = 0x1111;
constexpr std::uint64_t kPerturbStream = 0x2222;
}  // namespace

DepthMap random_init(int level, const CalibratedView& ref,
                     const PatchMatchConfig& config) {
  DepthMap out(ref.intrinsics.height, ref.intrinsics.width, 0.0, true);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      PixelRng rng = pixel_rng(config.rng_seed ^ kInitStream, level, 0, x, y);
      out.depth(y, x) = rng.uniform(ref.depth_min, ref.depth_max);
    }
  }
  return out;
}

DepthMap upsample_init(const DepthMap& coarse) {
  if (coarse.height() < 1 || coarse.width() < 1) {
    throw DimensionMismatch("empty coarse map");
  }
  DepthMap out(coarse.height() * 2, coarse.width() * 2);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out.depth(y, x) = coarse.depth(y / 2, x / 2);
      out.valid(y, x) = coarse.valid(y / 2, x / 2);
    }
  }
  return out;
}

CandidateGrid propagate(const DepthMap& depth, int parity) {
  CandidateGrid out(depth.height(), depth.width());
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      auto& cands = out(y, x);
      cands.push_back(depth.depth(y, x));  // incumbent first: wins ties
      if ((x + y) % 2 != parity) continue;
      if (y > 0) cands.push_back(depth.depth(y - 1, x));
      if (y + 1 < depth.height()) cands.push_back(depth.depth(y + 1, x));
      if (x > 0) cands.push_back(depth.depth(y, x - 1));
      if (x + 1 < depth.width()) cands.push_back(depth.depth(y, x + 1));
    }
  }
  return out;
}

void random_perturbation(const DepthMap& depth, int round,
                         const PatchMatchConfig& config, int level, int parity,
                         double depth_min, double depth_max,
                         CandidateGrid* candidates) {
  if (round < 0) throw InvalidParameter("round must be >= 0");
  const double half_width =
      (depth_max - depth_min) / 4.0 / std::pow(2.0, round);
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if ((x + y) % 2 != parity) continue;
      auto& cands = (*candidates)(y, x);
      const int extra =
          config.hypotheses_per_pixel - static_cast<int>(cands.size());
      if (extra <= 0) continue;
      PixelRng rng =
          pixel_rng(config.rng_seed ^ kPerturbStream, level, round, x, y);
      const double center = depth.depth(y, x);
      for (int i = 0; i < extra; ++i) {
        const double d = rng.uniform(center - half_width, center + half_width);
        cands.push_back(std::clamp(d, depth_min, depth_max));
      }
    }
  }
}

double ncc_cost(const CalibratedView& ref,
                const std::vector<HomographyWarper>& warpers,
                const std::vector<const GridD*>& src_images, int x, int y,
                double depth, int window, bool* in_any_source) {
  const int r = window / 2;
  const int min_samples = (window * window + 1) / 2;  // >= 50% in bounds
  double cost_sum = 0;
  int used_views = 0;
  bool any = false;

  for (std::size_t v = 0; v < warpers.size(); ++v) {
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    int m = 0;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        const int rx = x + dx;
        const int ry = y + dy;
        if (rx < 0 || ry < 0 || rx >= ref.image.width() ||
            ry >= ref.image.height()) {
          continue;
        }
        WarpResult wr;
        if (!warpers[v].warp(rx, ry, depth, &wr) || !wr.in_bounds) continue;
        double b;
        if (!bilinear_sample(*src_images[v], wr.pixel.x(), wr.pixel.y(), &b)) {
          continue;
        }
        const double a = ref.image(ry, rx);
        sa += a;
        sb += b;
        saa += a * a;
        sbb += b * b;
        sab += a * b;
        ++m;
      }
    }
    if (m < min_samples) continue;
    any = true;
    const double inv_m = 1.0 / m;
    const double var_a = saa - sa * sa * inv_m;
    const double var_b = sbb - sb * sb * inv_m;
    double cost;
    if (var_a < kNccEpsilon) {
      cost = kWorstCost;  // textureless reference patch carries no signal
    } else {
      const double cov = sab - sa * sb * inv_m;
      const double ncc = cov / std::sqrt(var_a * var_b + kNccEpsilon);
      cost = std::clamp(1.0 - ncc, 0.0, kWorstCost);
    }
    cost_sum += cost;
    ++used_views;
  }

  if (in_any_source) *in_any_source = any;
  if (used_views == 0) return kWorstCost;
  return cost_sum / used_views;
}

DepthMap evaluate(const CalibratedView& ref,
                  const std::vector<CalibratedView>& sources,
                  const CandidateGrid& candidates,
                  const PatchMatchConfig& config, GridD* cost_out,
                  int threads) {
  if (sources.empty()) throw NoSources();
  const int h = ref.intrinsics.height;
  const int w = ref.intrinsics.width;
  if (candidates.height() != h || candidates.width() != w) {
    throw DimensionMismatch();
  }

  std::vector<HomographyWarper> warpers;
  std::vector<const GridD*> src_images;
  warpers.reserve(sources.size());
  for (const auto& src : sources) {
    warpers.emplace_back(ref, src);
    src_images.push_back(&src.image);
  }

  DepthMap out(h, w);
  GridD costs(h, w, kWorstCost);
  parallel_for(static_cast<std::int64_t>(h) * w, threads, [&](std::int64_t i) {
    const int y = static_cast<int>(i / w);
    const int x = static_cast<int>(i % w);
    const auto& cands = candidates(y, x);
    double best_cost = std::numeric_limits<double>::infinity();
    double best_depth = 0;
    bool best_in_bounds = false;
    for (const double d : cands) {
      bool any = false;
      const double c =
          ncc_cost(ref, warpers, src_images, x, y, d, config.window, &any);
      if (c < best_cost) {  // strict: first candidate wins ties
        best_cost = c;
        best_depth = d;
        best_in_bounds = any;
      }
    }
    out.depth(y, x) = best_depth;
    out.valid(y, x) = best_in_bounds ? 1 : 0;
    costs(y, x) = best_cost;
  });
  if (cost_out) *cost_out = std::move(costs);
  return out;
}

CalibratedView downsample_view(const CalibratedView& view, int factor) {
  CalibratedView out;
  out.intrinsics = view.intrinsics.downsampled(factor);
  out.pose = view.pose;
  out.depth_min = view.depth_min;
  out.depth_max = view.depth_max;
  out.image = GridD(out.intrinsics.height, out.intrinsics.width, 0.0);
  // Box average over the factor x factor block.
  const double inv = 1.0 / (factor * factor);
  for (int y = 0; y < out.intrinsics.height; ++y) {
    for (int x = 0; x < out.intrinsics.width; ++x) {
      double s = 0;
      for (int dy = 0; dy < factor; ++dy) {
        for (int dx = 0; dx < factor; ++dx) {
          s += view.image(y * factor + dy, x * factor + dx);
        }
      }
      out.image(y, x) = s * inv;
    }
  }
  return out;
}

DepthMap run(const CalibratedView& ref,
             const std::vector<CalibratedView>& sources,
             const PatchMatchConfig& config, int threads,
             const RoundObserver& observer) {
  config.validate();
  if (sources.empty()) throw NoSources();
  const int min_side = 1 << config.levels;
  if (ref.intrinsics.width < min_side || ref.intrinsics.height < min_side) {
    throw ImageTooSmall("image smaller than 2^levels per side");
  }
  if (ref.intrinsics.width % min_side != 0 ||
      ref.intrinsics.height % min_side != 0) {
    throw ImageTooSmall("image dimensions must be divisible by 2^levels");
  }

  // Level 0 is half the input resolution.
  std::vector<CalibratedView> ref_levels(config.levels);
  std::vector<std::vector<CalibratedView>> src_levels(config.levels);
  for (int level = 0; level < config.levels; ++level) {
    const int factor = 2 << level;
    ref_levels[level] = downsample_view(ref, factor);
    for (const auto& src : sources) {
      src_levels[level].push_back(downsample_view(src, factor));
    }
  }

  const int coarsest = config.levels - 1;
  DepthMap depth = random_init(coarsest, ref_levels[coarsest], config);
  int round = 0;
  for (int level = coarsest; level >= 0; --level) {
    if (level != coarsest) depth = upsample_init(depth);
    const auto& ref_l = ref_levels[level];
    const auto& srcs_l = src_levels[level];
    for (int iter = 0; iter < config.iterations_per_level; ++iter) {
      for (int parity = 0; parity < 2; ++parity) {
        CandidateGrid cands = propagate(depth, parity);
        random_perturbation(depth, round, config, level, parity,
                            ref.depth_min, ref.depth_max, &cands);
        GridD costs;
        depth = evaluate(ref_l, srcs_l, cands, config, &costs, threads);
        if (observer) observer(level, iter * 2 + parity, costs);
      }
      ++round;
    }
  }
  return depth;
}

}  // namespace bimvs
