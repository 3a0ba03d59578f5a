#include "bimvs/losses.hpp"

#include <cmath>
#include <cstdint>

namespace bimvs {

namespace {

double sign0(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

void check_same_size(const DepthMap& a, const DepthMap& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw DimensionMismatch();
  }
}

std::int64_t count_valid(const GridU8& mask) {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) ++n;
  }
  return n;
}

}  // namespace

double depth_gt_loss(const std::vector<const DepthMap*>& estimates,
                     const std::vector<const GroundTruth*>& gts) {
  if (estimates.size() != gts.size()) {
    throw DimensionMismatch("estimate/GT scale counts differ");
  }
  double total = 0;
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const DepthMap& est = *estimates[k];
    const GroundTruth& gt = *gts[k];
    check_same_size(est, gt);
    double sum = 0;
    std::int64_t n = 0;
    for (std::size_t i = 0; i < est.depth.size(); ++i) {
      if (!est.valid[i] || !gt.valid[i]) continue;
      sum += std::abs(est.depth[i] - gt.depth[i]);
      ++n;
    }
    if (n > 0) total += sum / static_cast<double>(n);
  }
  return total;
}

double edge_mse_term(const EdgeMap& edge, const BoundaryMask& target,
                     const GridU8& valid, double weight, GridD* grad_edge) {
  if (!edge.grid.same_size(target) || !edge.grid.same_size(valid)) {
    throw DimensionMismatch();
  }
  const std::int64_t n = count_valid(valid);
  if (n == 0) return 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  double sum = 0;
  for (std::size_t i = 0; i < edge.grid.size(); ++i) {
    if (!valid[i]) continue;
    const double d = edge.grid[i] - (target[i] ? 1.0 : 0.0);
    sum += d * d;
    if (grad_edge) (*grad_edge)[i] += weight * 2.0 * d * inv_n;
  }
  return sum * inv_n;
}

double smoothness_term(const DepthMap& depth, const EdgeMap& edge, double beta,
                       const GridU8& valid, double weight, GridD* grad_edge,
                       GridD* grad_depth) {
  if (!(beta > 0)) throw NonPositiveBeta();
  if (!edge.grid.same_size(depth.depth) || !edge.grid.same_size(valid)) {
    throw DimensionMismatch();
  }
  const GridD lap = laplacian(depth);
  const std::int64_t n = count_valid(valid);
  if (n == 0) return 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  double sum = 0;
  const int h = depth.height();
  const int w = depth.width();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!valid(y, x)) continue;
      const double omega = std::exp(-beta * edge.grid(y, x));
      const double l = lap(y, x);
      sum += omega * std::abs(l);
      if (grad_edge) {
        (*grad_edge)(y, x) += weight * (-beta) * omega * std::abs(l) * inv_n;
      }
      if (grad_depth) {
        const double s = sign0(l);
        if (s != 0.0) {
          // nonzero laplacian implies an interior, fully valid stencil
          const double c = weight * omega * s * inv_n;
          (*grad_depth)(y, x) += -4.0 * c;
          (*grad_depth)(y - 1, x) += c;
          (*grad_depth)(y + 1, x) += c;
          (*grad_depth)(y, x - 1) += c;
          (*grad_depth)(y, x + 1) += c;
        }
      }
    }
  }
  return sum * inv_n;
}

double edge_depth_loss(const EdgeMap& edge, const GroundTruth& gt, double tau) {
  if (edge.height() != gt.height() || edge.width() != gt.width()) {
    throw DimensionMismatch();
  }
  return edge_mse_term(edge, phi(gt, tau), gt.valid, 1.0, nullptr);
}

double smoothness_loss(const DepthMap& depth, const EdgeMap& edge, double beta,
                       const GridU8* valid_mask) {
  const GridU8& mask = valid_mask ? *valid_mask : depth.valid;
  return smoothness_term(depth, edge, beta, mask, 1.0, nullptr, nullptr);
}

double bimodal_loss(const BimodalDepthMap& map, const GroundTruth& gt) {
  if (map.height() != gt.height() || map.width() != gt.width()) {
    throw DimensionMismatch();
  }
  double sum = 0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < gt.depth.size(); ++i) {
    if (!gt.valid[i]) continue;
    sum += -std::log(density(gt.depth[i], map.grid[i]));
    ++n;
  }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

LossReport total_loss(const TotalLossInputs& in, const LossWeights& weights,
                      bool with_gradients) {
  LossReport report;
  const int h = in.gt ? in.gt->height() : 0;
  const int w = in.gt ? in.gt->width() : 0;

  auto& g = report.grads;
  if (with_gradients) {
    if (in.depth) g.depth = GridD(h, w, 0.0);
    if (in.edge) g.edge = GridD(h, w, 0.0);
    if (in.bimodal) {
      g.alpha = GridD(h, w, 0.0);
      g.mu1 = GridD(h, w, 0.0);
      g.sigma1 = GridD(h, w, 0.0);
      g.mu2 = GridD(h, w, 0.0);
      g.sigma2 = GridD(h, w, 0.0);
    }
  }

  // L_gt over all scales; only scale 0 carries gradient.
  std::vector<const DepthMap*> ests;
  std::vector<const GroundTruth*> gts;
  if (in.depth && in.gt) {
    ests.push_back(in.depth);
    gts.push_back(in.gt);
  }
  for (std::size_t k = 0; k < in.coarse.size(); ++k) {
    ests.push_back(in.coarse[k]);
    gts.push_back(in.coarse_gts[k]);
  }
  report.l_gt = depth_gt_loss(ests, gts);
  if (with_gradients && in.depth && in.gt) {
    std::int64_t n0 = 0;
    for (std::size_t i = 0; i < in.gt->depth.size(); ++i) {
      if (in.depth->valid[i] && in.gt->valid[i]) ++n0;
    }
    if (n0 > 0) {
      for (std::size_t i = 0; i < in.gt->depth.size(); ++i) {
        if (!in.depth->valid[i] || !in.gt->valid[i]) continue;
        g.depth[i] += sign0(in.depth->depth[i] - in.gt->depth[i]) /
                      static_cast<double>(n0);
      }
    }
  }

  if (in.edge && in.gt) {
    report.l_ed = edge_mse_term(*in.edge, phi(*in.gt, in.tau), in.gt->valid,
                                weights.lambda1,
                                with_gradients ? &g.edge : nullptr);
  }
  if (in.depth && in.edge) {
    const GridU8& mask = in.gt ? in.gt->valid : in.depth->valid;
    report.l_sm = smoothness_term(*in.depth, *in.edge, in.beta, mask,
                                  weights.lambda2,
                                  with_gradients ? &g.edge : nullptr,
                                  with_gradients ? &g.depth : nullptr);
  }

  if (in.bimodal && in.gt) {
    if (in.bimodal->height() != h || in.bimodal->width() != w) {
      throw DimensionMismatch();
    }
    std::int64_t n = 0;
    for (std::size_t i = 0; i < in.gt->depth.size(); ++i) {
      if (in.gt->valid[i]) ++n;
    }
    if (n > 0) {
      double sum = 0;
      const double c = weights.lambda3 / static_cast<double>(n);
      for (std::size_t i = 0; i < in.gt->depth.size(); ++i) {
        if (!in.gt->valid[i]) continue;
        const auto& t = in.bimodal->grid[i];
        const double x = in.gt->depth[i];
        const double e1 = std::exp(-std::abs(x - t.mu1) / t.sigma1);
        const double e2 = std::exp(-std::abs(x - t.mu2) / t.sigma2);
        const double term1 = t.alpha / (2 * t.sigma1) * e1;
        const double term2 = (1 - t.alpha) / (2 * t.sigma2) * e2;
        const double p = term1 + term2;
        sum += -std::log(p);
        if (with_gradients) {
          const double scale = -c / p;
          g.alpha[i] += scale * (e1 / (2 * t.sigma1) - e2 / (2 * t.sigma2));
          g.mu1[i] += scale * term1 * sign0(x - t.mu1) / t.sigma1;
          g.mu2[i] += scale * term2 * sign0(x - t.mu2) / t.sigma2;
          g.sigma1[i] +=
              scale * term1 * (std::abs(x - t.mu1) / (t.sigma1 * t.sigma1) -
                               1.0 / t.sigma1);
          g.sigma2[i] +=
              scale * term2 * (std::abs(x - t.mu2) / (t.sigma2 * t.sigma2) -
                               1.0 / t.sigma2);
        }
      }
      report.l_bi = sum / static_cast<double>(n);
    }
  }

  report.l_total = report.l_gt + weights.lambda1 * report.l_ed +
                   weights.lambda2 * report.l_sm + weights.lambda3 * report.l_bi;
  return report;
}

GroundTruth downsample_nn(const GroundTruth& gt, int factor) {
  if (factor < 1 || gt.height() % factor != 0 || gt.width() % factor != 0) {
    throw DimensionMismatch("dimensions not divisible by downsample factor");
  }
  GroundTruth out(gt.height() / factor, gt.width() / factor);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out.depth(y, x) = gt.depth(y * factor, x * factor);
      out.valid(y, x) = gt.valid(y * factor, x * factor);
    }
  }
  return out;
}

}  // namespace bimvs
