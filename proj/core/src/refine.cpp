#include "bimvs/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bimvs/discontinuity.hpp"
#include "bimvs/parallel.hpp"
#include "bimvs/patchmatch.hpp"

namespace bimvs {

void RefineConfig::validate() const {
  if (steps < 0) throw InvalidParameter("steps must be >= 0");
  if (!(step_size > 0)) throw InvalidParameter("step_size must be positive");
  if (!(sigma_init > 0 && sigma_init < 1) ||
      !(mu_offset_init > 0 && mu_offset_init < 1)) {
    throw InvalidParameter("init fractions must lie in (0, 1)");
  }
  if (edge_target_period < 1) {
    throw InvalidParameter("edge_target_period must be >= 1");
  }
}

double RefineConfig::resolved_tau(double depth_range) const {
  return tau > 0 ? tau : default_tau(depth_range);
}

DepthMap upsample_depth(const DepthMap& coarse, const GridD& guide) {
  if (guide.height() != coarse.height() * 2 ||
      guide.width() != coarse.width() * 2) {
    throw DimensionMismatch("guide must be exactly 2x the coarse depth map");
  }
  constexpr double kSigmaSpatial = 1.0;   // coarse pixels
  constexpr double kSigmaColor = 0.1;     // intensity in [0, 1]
  constexpr int kRadius = 2;              // 2 * sigma_spatial

  DepthMap out(guide.height(), guide.width());
  for (int yf = 0; yf < out.height(); ++yf) {
    for (int xf = 0; xf < out.width(); ++xf) {
      const double yc = (yf + 0.5) / 2.0 - 0.5;
      const double xc = (xf + 0.5) / 2.0 - 0.5;
      const double g_here = guide(yf, xf);
      const int y0 = static_cast<int>(std::floor(yc)) - kRadius + 1;
      const int x0 = static_cast<int>(std::floor(xc)) - kRadius + 1;
      double wsum = 0, dsum = 0;
      for (int j = y0; j < y0 + 2 * kRadius; ++j) {
        for (int i = x0; i < x0 + 2 * kRadius; ++i) {
          if (!coarse.depth.contains(j, i) || !coarse.is_valid(j, i)) continue;
          const double ds2 = (j - yc) * (j - yc) + (i - xc) * (i - xc);
          // guide intensity at the fine-scale position of coarse (j, i)
          double g_there;
          if (!bilinear_sample(guide, 2 * i + 0.5, 2 * j + 0.5, &g_there)) {
            continue;
          }
          const double dc = g_here - g_there;
          const double w =
              std::exp(-ds2 / (2 * kSigmaSpatial * kSigmaSpatial)) *
              std::exp(-dc * dc / (2 * kSigmaColor * kSigmaColor));
          wsum += w;
          dsum += w * coarse.depth(j, i);
        }
      }
      if (wsum > 0) {
        out.depth(yf, xf) = dsum / wsum;
        out.valid(yf, xf) = 1;
      }
    }
  }
  return out;
}

RefineInit init_parameters(const DepthMap& depth, const RefineConfig& config,
                           double depth_min, double depth_max) {
  config.validate();
  const double range = depth_max - depth_min;
  const double tau = config.resolved_tau(range);
  const int h = depth.height();
  const int w = depth.width();

  RefineInit init;
  init.bimodal = BimodalDepthMap(h, w);
  init.edge = EdgeMap(h, w, 0.0);
  init.valid = depth.valid;

  GridD lap(h, w, 0.0);
  if (h >= 3 && w >= 3) lap = laplacian(depth);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      BimodalLaplacian t;
      const double d = depth.depth(y, x);
      t.mu1 = d;
      // most-different valid 8-neighbor
      double best_diff = -1;
      double mu2 = d + config.mu_offset_init * range;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dy == 0 && dx == 0) continue;
          const int ny = y + dy;
          const int nx = x + dx;
          if (!depth.depth.contains(ny, nx) || !depth.is_valid(ny, nx)) {
            continue;
          }
          const double diff = std::abs(depth.depth(ny, nx) - d);
          if (diff > best_diff) {
            best_diff = diff;
            mu2 = depth.depth(ny, nx);
          }
        }
      }
      if (best_diff <= 0) mu2 = d + config.mu_offset_init * range;
      t.mu2 = mu2;
      t.sigma1 = t.sigma2 = config.sigma_init * range;
      t.alpha = config.alpha_init;
      init.bimodal.grid(y, x) = t;
      init.edge.grid(y, x) = std::min(1.0, std::abs(lap(y, x)) / tau);
    }
  }
  return init;
}

namespace {

// Pre-images of the optimized grids.
struct RawState {
  GridD a, m1, s1, m2, s2, e;
};

RawState raw_from_init(const RefineInit& init) {
  const int h = init.bimodal.height();
  const int w = init.bimodal.width();
  RawState s{GridD(h, w), GridD(h, w), GridD(h, w),
             GridD(h, w), GridD(h, w), GridD(h, w)};
  for (std::size_t i = 0; i < init.bimodal.grid.size(); ++i) {
    const auto& t = init.bimodal.grid[i];
    s.a[i] = raw_from_alpha(t.alpha);
    s.m1[i] = t.mu1;
    s.s1[i] = raw_from_sigma(t.sigma1);
    s.m2[i] = t.mu2;
    s.s2[i] = raw_from_sigma(t.sigma2);
    s.e[i] = raw_from_edge(init.edge.grid[i]);
  }
  return s;
}

void materialize(const RawState& s, int h, int w, BimodalDepthMap* bimodal,
                 EdgeMap* edge) {
  *bimodal = BimodalDepthMap(h, w);
  *edge = EdgeMap(h, w);
  for (std::size_t i = 0; i < s.a.size(); ++i) {
    auto& t = bimodal->grid[i];
    t.alpha = alpha_from_raw(s.a[i]);
    t.mu1 = s.m1[i];
    t.sigma1 = sigma_from_raw(s.s1[i]);
    t.mu2 = s.m2[i];
    t.sigma2 = sigma_from_raw(s.s2[i]);
    edge->grid[i] = edge_from_raw(s.e[i]);
  }
}

DepthMap collapse_masked(const BimodalDepthMap& bimodal, const GridU8& valid) {
  DepthMap d = collapse(bimodal);
  d.valid = valid;
  return d;
}

// Raw-space gradient: chain the parameter-space partials through the
// reparameterizations; the collapsed-depth partial is routed to the mu
// of the currently winning mode.
RawState chain_gradients(const RawState& s, const BimodalDepthMap& bimodal,
                         const LossGradients& g) {
  const int h = bimodal.height();
  const int w = bimodal.width();
  RawState out{GridD(h, w, 0.0), GridD(h, w, 0.0), GridD(h, w, 0.0),
               GridD(h, w, 0.0), GridD(h, w, 0.0), GridD(h, w, 0.0)};
  const bool has_theta = !g.alpha.empty();
  const bool has_depth = !g.depth.empty();
  const bool has_edge = !g.edge.empty();
  for (std::size_t i = 0; i < s.a.size(); ++i) {
    double gm1 = has_theta ? g.mu1[i] : 0.0;
    double gm2 = has_theta ? g.mu2[i] : 0.0;
    if (has_depth) {
      const auto [r1, r2] = responsibility(bimodal.grid[i]);
      if (r1 >= r2) {
        gm1 += g.depth[i];
      } else {
        gm2 += g.depth[i];
      }
    }
    out.m1[i] = gm1;
    out.m2[i] = gm2;
    if (has_theta) {
      out.a[i] = g.alpha[i] * dalpha_draw(s.a[i]);
      out.s1[i] = g.sigma1[i] * dsigma_draw(s.s1[i]);
      out.s2[i] = g.sigma2[i] * dsigma_draw(s.s2[i]);
    }
    if (has_edge) out.e[i] = g.edge[i] * dedge_draw(s.e[i]);
  }
  return out;
}

void axpy(const GridD& g, double step, GridD* x) {
  for (std::size_t i = 0; i < g.size(); ++i) (*x)[i] -= step * g[i];
}

RawState stepped(const RawState& s, const RawState& g, double step) {
  RawState out = s;
  axpy(g.a, step, &out.a);
  axpy(g.m1, step, &out.m1);
  axpy(g.s1, step, &out.s1);
  axpy(g.m2, step, &out.m2);
  axpy(g.s2, step, &out.s2);
  axpy(g.e, step, &out.e);
  return out;
}

double cosine_lr(const RefineConfig& c, int t) {
  if (c.steps <= 1) return c.step_size;
  const double f = 0.5 * (1.0 + std::cos(M_PI * t / (c.steps - 1)));
  return c.step_size_final + (c.step_size - c.step_size_final) * f;
}

// Backtracking descent shared by both modes. `eval` must be a pure
// function of the raw state (the edge-target refresh in self-supervised
// mode re-enters through `on_step`).
template <typename Eval, typename OnStep>
RefineResult descend(const RefineInit& init, const RefineConfig& config,
                     Eval&& eval, OnStep&& on_step, double depth_min,
                     double depth_max) {
  const int h = init.bimodal.height();
  const int w = init.bimodal.width();
  RawState state = raw_from_init(init);

  LossReport cur = eval(state);
  if (!std::isfinite(cur.l_total)) throw DivergedLoss();

  RefineResult result;
  result.trace.push_back(
      {0.0, cur.l_total, cur.l_gt, cur.l_ed, cur.l_sm, cur.l_bi});

  double scale = 1.0;
  for (int t = 0; t < config.steps; ++t) {
    const bool refreshed = on_step(t);
    if (refreshed) {
      cur = eval(state);
      if (!std::isfinite(cur.l_total)) throw DivergedLoss();
    }
    BimodalDepthMap bimodal;
    EdgeMap edge;
    materialize(state, h, w, &bimodal, &edge);
    const RawState grad = chain_gradients(state, bimodal, cur.grads);
    const double lr = cosine_lr(config, t);
    for (int attempt = 0; attempt < 60; ++attempt) {
      const RawState trial = stepped(state, grad, lr * scale);
      const LossReport trial_loss = eval(trial);
      if (std::isfinite(trial_loss.l_total) &&
          trial_loss.l_total <= cur.l_total) {
        state = trial;
        cur = trial_loss;
        // Recover from earlier sharp regions: re-grow after clean steps.
        if (attempt == 0) scale = std::min(1.0, scale * 2.0);
        break;
      }
      scale *= 0.5;
    }
    result.trace.push_back({static_cast<double>(t + 1), cur.l_total, cur.l_gt,
                            cur.l_ed, cur.l_sm, cur.l_bi});
  }

  materialize(state, h, w, &result.bimodal, &result.edge);
  result.depth = collapse_masked(result.bimodal, init.valid);
  for (std::size_t i = 0; i < result.depth.depth.size(); ++i) {
    result.depth.depth[i] =
        std::clamp(result.depth.depth[i], depth_min, depth_max);
  }
  return result;
}

}  // namespace

RefineResult refine_supervised(const RefineInit& init, const GroundTruth& gt,
                               const std::vector<const DepthMap*>& pms_levels,
                               const std::vector<const GroundTruth*>& pms_gts,
                               const RefineConfig& config,
                               const LossWeights& weights, double depth_min,
                               double depth_max, int /*threads*/) {
  config.validate();
  if (gt.height() != init.bimodal.height() ||
      gt.width() != init.bimodal.width()) {
    throw DimensionMismatch();
  }
  const int h = gt.height();
  const int w = gt.width();
  const double tau = config.resolved_tau(depth_max - depth_min);

  auto eval = [&](const RawState& s) {
    BimodalDepthMap bimodal;
    EdgeMap edge;
    materialize(s, h, w, &bimodal, &edge);
    const DepthMap depth = collapse_masked(bimodal, init.valid);
    TotalLossInputs in;
    in.depth = &depth;
    in.coarse = pms_levels;
    in.gt = &gt;
    in.coarse_gts = pms_gts;
    in.bimodal = &bimodal;
    in.edge = &edge;
    in.tau = tau;
    in.beta = config.beta;
    return total_loss(in, weights, /*with_gradients=*/true);
  };
  return descend(init, config, eval, [](int) { return false; }, depth_min,
                 depth_max);
}

RefineResult refine_self_supervised(const RefineInit& init,
                                    const CalibratedView& ref,
                                    const std::vector<CalibratedView>& sources,
                                    const RefineConfig& config,
                                    const LossWeights& weights, int threads) {
  config.validate();
  if (sources.empty()) throw NoSources();
  const int h = init.bimodal.height();
  const int w = init.bimodal.width();
  if (ref.intrinsics.height != h || ref.intrinsics.width != w) {
    throw DimensionMismatch("refinement grid must match the reference view");
  }
  const double range = ref.depth_range();
  const double tau = config.resolved_tau(range);
  const double fd_step = 1e-3 * range;
  constexpr int kWindow = 5;

  std::vector<HomographyWarper> warpers;
  std::vector<const GridD*> src_images;
  for (const auto& src : sources) {
    warpers.emplace_back(ref, src);
    src_images.push_back(&src.image);
  }

  // Edge target: threshold mask of the collapsed depth, held constant
  // between refreshes.
  BoundaryMask edge_target(h, w, 0);

  auto eval = [&](const RawState& s) {
    BimodalDepthMap bimodal;
    EdgeMap edge;
    materialize(s, h, w, &bimodal, &edge);
    const DepthMap depth = collapse_masked(bimodal, init.valid);

    LossReport report;
    report.grads.depth = GridD(h, w, 0.0);
    report.grads.edge = GridD(h, w, 0.0);
    report.grads.alpha = GridD(h, w, 0.0);
    report.grads.mu1 = GridD(h, w, 0.0);
    report.grads.sigma1 = GridD(h, w, 0.0);
    report.grads.mu2 = GridD(h, w, 0.0);
    report.grads.sigma2 = GridD(h, w, 0.0);

    std::int64_t n = 0;
    for (std::size_t i = 0; i < init.valid.size(); ++i) {
      if (init.valid[i]) ++n;
    }
    if (n > 0) {
      const double inv_n = 1.0 / static_cast<double>(n);
      GridD photo(h, w, 0.0);
      parallel_for(static_cast<std::int64_t>(h) * w, threads,
                   [&](std::int64_t i) {
                     const int y = static_cast<int>(i / w);
                     const int x = static_cast<int>(i % w);
                     if (!init.valid(y, x)) return;
                     const double d = depth.depth(y, x);
                     photo(y, x) = ncc_cost(ref, warpers, src_images, x, y, d,
                                            kWindow, nullptr);
                     const double up = ncc_cost(ref, warpers, src_images, x, y,
                                                d + fd_step, kWindow, nullptr);
                     const double down =
                         ncc_cost(ref, warpers, src_images, x, y, d - fd_step,
                                  kWindow, nullptr);
                     report.grads.depth(y, x) =
                         (up - down) / (2 * fd_step) * inv_n;
                   });
      double sum = 0;
      for (std::size_t i = 0; i < photo.size(); ++i) sum += photo[i];
      report.l_gt = sum * inv_n;  // photometric data term
    }

    report.l_ed = edge_mse_term(edge, edge_target, init.valid, weights.lambda1,
                                &report.grads.edge);
    report.l_sm = smoothness_term(depth, edge, config.beta, init.valid,
                                  weights.lambda2, &report.grads.edge,
                                  &report.grads.depth);
    report.l_bi = 0;
    report.l_total = report.l_gt + weights.lambda1 * report.l_ed +
                     weights.lambda2 * report.l_sm;
    return report;
  };

  RawState state = raw_from_init(init);
  auto refresh_target = [&](const RawState& s) {
    BimodalDepthMap bimodal;
    EdgeMap edge;
    materialize(s, h, w, &bimodal, &edge);
    const DepthMap depth = collapse_masked(bimodal, init.valid);
    if (h >= 3 && w >= 3) {
      edge_target = phi(depth, tau);
    }
  };
  refresh_target(state);

  LossReport cur = eval(state);
  if (!std::isfinite(cur.l_total)) throw DivergedLoss();
  RefineResult result;
  result.trace.push_back(
      {0.0, cur.l_total, cur.l_gt, cur.l_ed, cur.l_sm, cur.l_bi});

  double scale = 1.0;
  for (int t = 0; t < config.steps; ++t) {
    if (t > 0 && t % config.edge_target_period == 0) {
      refresh_target(state);
      cur = eval(state);
      if (!std::isfinite(cur.l_total)) throw DivergedLoss();
    }
    BimodalDepthMap bimodal;
    EdgeMap edge;
    materialize(state, h, w, &bimodal, &edge);
    const RawState grad = chain_gradients(state, bimodal, cur.grads);
    const double lr = cosine_lr(config, t);
    for (int attempt = 0; attempt < 60; ++attempt) {
      const RawState trial = stepped(state, grad, lr * scale);
      const LossReport trial_loss = eval(trial);
      if (std::isfinite(trial_loss.l_total) &&
          trial_loss.l_total <= cur.l_total) {
        state = trial;
        cur = trial_loss;
        if (attempt == 0) scale = std::min(1.0, scale * 2.0);
        break;
      }
      scale *= 0.5;
    }
    result.trace.push_back({static_cast<double>(t + 1), cur.l_total, cur.l_gt,
                            cur.l_ed, cur.l_sm, cur.l_bi});
  }

  materialize(state, h, w, &result.bimodal, &result.edge);
  result.depth = collapse_masked(result.bimodal, init.valid);
  for (std::size_t i = 0; i < result.depth.depth.size(); ++i) {
    result.depth.depth[i] =
        std::clamp(result.depth.depth[i], ref.depth_min, ref.depth_max);
  }
  return result;
}

}  // namespace bimvs
