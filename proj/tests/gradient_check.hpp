#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "bimvs/discontinuity.hpp"
#include "bimvs/losses.hpp"

namespace bimvs::testing {

// One self-contained random total_loss configuration. Values are sampled
// with margins so no |.| kink lies within finite-difference reach.
struct LossFixture {
  DepthMap depth;
  DepthMap coarse;        // scale-1 constant estimate
  GroundTruth gt;
  GroundTruth coarse_gt;
  BimodalDepthMap bimodal;
  EdgeMap edge;
  double tau = 0.3;
  double beta = kDefaultBeta;

  TotalLossInputs inputs() const {
    TotalLossInputs in;
    in.depth = &depth;
    in.coarse = {&coarse};
    in.gt = &gt;
    in.coarse_gts = {&coarse_gt};
    in.bimodal = &bimodal;
    in.edge = &edge;
    in.tau = tau;
    in.beta = beta;
    return in;
  }
};

inline LossFixture random_loss_fixture(std::mt19937& rng, int h = 4,
                                       int w = 4) {
  std::uniform_real_distribution<double> ugt(1.0, 3.0);
  std::uniform_real_distribution<double> uoff(0.02, 0.3);
  std::uniform_real_distribution<double> umu(0.05, 0.6);
  std::uniform_real_distribution<double> usigma(0.05, 0.8);
  std::uniform_real_distribution<double> ualpha(0.05, 0.95);
  std::uniform_real_distribution<double> uedge(0.05, 0.95);
  std::bernoulli_distribution sign(0.5);
  std::bernoulli_distribution mostly_valid(0.85);

  for (;;) {
    LossFixture f;
    f.depth = DepthMap(h, w, 0.0, true);
    f.gt = GroundTruth(h, w, 0.0, true);
    f.bimodal = BimodalDepthMap(h, w);
    f.edge = EdgeMap(h, w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double g = ugt(rng);
        f.gt.depth(y, x) = g;
        f.gt.valid(y, x) = mostly_valid(rng) ? 1 : 0;
        f.depth.depth(y, x) = g + (sign(rng) ? 1 : -1) * uoff(rng);
        auto& t = f.bimodal.grid(y, x);
        t.alpha = ualpha(rng);
        t.mu1 = g + (sign(rng) ? 1 : -1) * umu(rng);
        t.mu2 = g + (sign(rng) ? 1 : -1) * umu(rng);
        t.sigma1 = usigma(rng);
        t.sigma2 = usigma(rng);
        f.edge.grid(y, x) = uedge(rng);
      }
    }
    f.coarse = DepthMap(h / 2, w / 2, 0.0, true);
    for (int y = 0; y < h / 2; ++y)
      for (int x = 0; x < w / 2; ++x)
        f.coarse.depth(y, x) = ugt(rng) + uoff(rng);
    f.coarse_gt = downsample_nn(f.gt, 2);

    // Reject fixtures whose smoothness term sits near the |lap| = 0 kink
    // at any pixel that actually depends on the depth values.
    const GridD lap = laplacian(f.depth);
    bool near_kink = false;
    for (int y = 1; y < h - 1 && !near_kink; ++y)
      for (int x = 1; x < w - 1; ++x)
        if (std::abs(lap(y, x)) < 1e-3) {
          near_kink = true;
          break;
        }
    if (!near_kink) return f;
  }
}

struct GradCheckStats {
  double max_rel_error = 0;
  std::string worst;   // which grid / pixel
  int checked = 0;
};

// Central finite differences of the weighted total against every analytic
// partial that total_loss reports.
inline GradCheckStats check_gradients(const LossFixture& f,
                                      const LossWeights& weights) {
  const auto total_of = [&](const LossFixture& g) {
    return total_loss(g.inputs(), weights, false).l_total;
  };
  const LossReport report = total_loss(f.inputs(), weights, true);

  GradCheckStats stats;
  const auto probe = [&](const GridD& analytic, const std::string& name,
                         auto&& setter) {
    for (int y = 0; y < f.depth.height(); ++y) {
      for (int x = 0; x < f.depth.width(); ++x) {
        LossFixture plus = f, minus = f;
        const double v = setter(plus, y, x, 0.0);  // read current value
        const double step = 1e-5 * std::max(1.0, std::abs(v));
        setter(plus, y, x, step);
        setter(minus, y, x, -step);
        const double fd = (total_of(plus) - total_of(minus)) / (2 * step);
        const double a = analytic(y, x);
        const double rel =
            std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-5});
        ++stats.checked;
        if (rel > stats.max_rel_error) {
          stats.max_rel_error = rel;
          stats.worst = name + "(" + std::to_string(y) + "," +
                        std::to_string(x) + ")";
        }
      }
    }
  };

  probe(report.grads.depth, "depth", [](LossFixture& g, int y, int x,
                                        double d) {
    return g.depth.depth(y, x) += d;
  });
  probe(report.grads.edge, "edge", [](LossFixture& g, int y, int x,
                                      double d) {
    return g.edge.grid(y, x) += d;
  });
  probe(report.grads.alpha, "alpha", [](LossFixture& g, int y, int x,
                                        double d) {
    return g.bimodal.grid(y, x).alpha += d;
  });
  probe(report.grads.mu1, "mu1", [](LossFixture& g, int y, int x, double d) {
    return g.bimodal.grid(y, x).mu1 += d;
  });
  probe(report.grads.sigma1, "sigma1", [](LossFixture& g, int y, int x,
                                          double d) {
    return g.bimodal.grid(y, x).sigma1 += d;
  });
  probe(report.grads.mu2, "mu2", [](LossFixture& g, int y, int x, double d) {
    return g.bimodal.grid(y, x).mu2 += d;
  });
  probe(report.grads.sigma2, "sigma2", [](LossFixture& g, int y, int x,
                                          double d) {
    return g.bimodal.grid(y, x).sigma2 += d;
  });
  return stats;
}

}  // namespace bimvs::testing
