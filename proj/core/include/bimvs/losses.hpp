#pragma once

#include <vector>

#include "bimvs/bimodal.hpp"
#include "bimvs/depth_map.hpp"
#include "bimvs/discontinuity.hpp"
#include "bimvs/errors.hpp"

namespace bimvs {

struct LossWeights {
  double lambda1 = 4.0;    // edge-depth
  double lambda2 = 1.25;   // smoothness
  double lambda3 = 0.5;    // bimodal NLL
};

// Partials of the weighted total with respect to every optimized grid.
// Empty grids mean "not requested".
struct LossGradients {
  GridD alpha, mu1, sigma1, mu2, sigma2;
  GridD edge;
  GridD depth;   // scale-0 depth estimate
};

struct LossReport {
  double l_gt = 0, l_ed = 0, l_sm = 0, l_bi = 0, l_total = 0;
  LossGradients grads;
};

// Multi-scale MAE, summed over scales. Pixels count when both the estimate
// and the ground truth are valid; scales with no such pixel contribute 0.
double depth_gt_loss(const std::vector<const DepthMap*>& estimates,
                     const std::vector<const GroundTruth*>& gts);

// MSE between E and the binarized Laplacian mask of the ground truth,
// averaged over GT-valid pixels.
double edge_depth_loss(const EdgeMap& edge, const GroundTruth& gt, double tau);

// Mean of exp(-beta E_i) |laplacian(depth)_i| over the pixel set given by
// valid_mask (GT validity); falls back to the depth map's own validity.
double smoothness_loss(const DepthMap& depth, const EdgeMap& edge, double beta,
                       const GridU8* valid_mask = nullptr);

// Mean negative log density of the GT depth under the per-pixel mixture.
double bimodal_loss(const BimodalDepthMap& map, const GroundTruth& gt);

struct TotalLossInputs {
  const DepthMap* depth = nullptr;              // scale-0 (finest) estimate
  std::vector<const DepthMap*> coarse;          // scales 1..3, constants
  const GroundTruth* gt = nullptr;
  std::vector<const GroundTruth*> coarse_gts;   // matching the coarse list
  const BimodalDepthMap* bimodal = nullptr;     // optional
  const EdgeMap* edge = nullptr;                // optional
  double tau = 0;
  double beta = kDefaultBeta;
};

// All four terms, the weighted total, and (optionally) analytic gradients
// with respect to the scale-0 depth, the edge map, and the five mixture
// parameter grids. Subgradient of |x| at 0 is taken as 0.
LossReport total_loss(const TotalLossInputs& in, const LossWeights& weights,
                      bool with_gradients);

// Nearest-neighbor downsampling (top-left sample of each block).
GroundTruth downsample_nn(const GroundTruth& gt, int factor);

// Building blocks shared with the refinement stage. Each returns the raw
// (unweighted) term value; gradients, when requested, are accumulated
// scaled by `weight`.
double edge_mse_term(const EdgeMap& edge, const BoundaryMask& target,
                     const GridU8& valid, double weight, GridD* grad_edge);
double smoothness_term(const DepthMap& depth, const EdgeMap& edge, double beta,
                       const GridU8& valid, double weight, GridD* grad_edge,
                       GridD* grad_depth);

}  // namespace bimvs
