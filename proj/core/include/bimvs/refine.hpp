#pragma once

#include <array>
#include <vector>

#include "bimvs/bimodal.hpp"
#include "bimvs/depth_map.hpp"
#include "bimvs/geometry.hpp"
#include "bimvs/losses.hpp"

namespace bimvs {

struct RefineConfig {
  int steps = 400;
  double step_size = 0.05;         // cosine-decayed to step_size_final
  double step_size_final = 0.001;
  double beta = kDefaultBeta;
  double tau = 0;                  // <= 0 selects default_tau(range)
  double sigma_init = 0.01;        // fraction of the depth range
  double mu_offset_init = 0.02;    // fraction of the depth range
  double alpha_init = 0.9;
  int edge_target_period = 25;     // self-supervised target refresh

  void validate() const;
  double resolved_tau(double depth_range) const;
};

// One trace row: step, total, data term, edge, smoothness, bimodal.
using TraceRow = std::array<double, 6>;

struct RefineResult {
  BimodalDepthMap bimodal;
  EdgeMap edge;
  DepthMap depth;                // collapse of bimodal, clamped to range
  std::vector<TraceRow> trace;
};

// Joint-bilateral 2x upsampling of a depth map guided by the fine-scale
// intensity image. Spatial Gaussian sigma is 1 coarse pixel, intensity
// Gaussian sigma is 0.1; invalid coarse pixels are excluded and fine
// pixels with zero total weight come out invalid.
DepthMap upsample_depth(const DepthMap& coarse, const GridD& guide);

struct RefineInit {
  BimodalDepthMap bimodal;
  EdgeMap edge;
  GridU8 valid;   // carried over from the input depth map
};

// Warm start: mu1 = depth, mu2 = most-different valid 8-neighbor depth
// (fallback mu1 + offset), sigma from sigma_init, alpha constant, and
// E = min(1, |laplacian| / tau).
RefineInit init_parameters(const DepthMap& depth, const RefineConfig& config,
                           double depth_min, double depth_max);

// Gradient descent on the full supervised objective over the mixture
// parameter and edge grids (through positive/bounded reparameterizations).
// The PMS level estimates, when given, enter the data term as constants.
RefineResult refine_supervised(const RefineInit& init, const GroundTruth& gt,
                               const std::vector<const DepthMap*>& pms_levels,
                               const std::vector<const GroundTruth*>& pms_gts,
                               const RefineConfig& config,
                               const LossWeights& weights, double depth_min,
                               double depth_max, int threads = 1);

// Inference-time variant: an NCC photometric data term replaces the GT
// terms, the edge target is the threshold mask of the current collapsed
// depth (refreshed every edge_target_period steps), and the bimodal NLL
// is dropped. Data-term gradients w.r.t. the winning mu use central
// finite differences with step 1e-3 * range.
RefineResult refine_self_supervised(const RefineInit& init,
                                    const CalibratedView& ref,
                                    const std::vector<CalibratedView>& sources,
                                    const RefineConfig& config,
                                    const LossWeights& weights,
                                    int threads = 1);

}  // namespace bimvs
