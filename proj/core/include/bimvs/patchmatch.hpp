#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bimvs/depth_map.hpp"
#include "bimvs/errors.hpp"
#include "bimvs/geometry.hpp"

namespace bimvs {

struct PatchMatchConfig {
  int levels = 3;
  int iterations_per_level = 2;
  int window = 5;                // odd, >= 3
  int hypotheses_per_pixel = 8;  // >= 2
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Cost of matching one textureless/failed patch; also the per-view cap
// since 1 - NCC lies in [0, 2].
inline constexpr double kWorstCost = 2.0;
// Small enough that it only guards the sqrt against zero variance;
// anything larger drowns the correlation signal of low-contrast patches.
inline constexpr double kNccEpsilon = 1e-12;

// Candidate depth hypotheses per pixel, evaluation order preserved
// (first candidate wins ties).
using CandidateGrid = Grid<std::vector<double>>;

// Uniform i.i.d. depths over the view's range; deterministic per seed.
DepthMap random_init(int level, const CalibratedView& ref,
                     const PatchMatchConfig& config);

// Nearest-neighbor 2x upsampling (block replication); target dims are
// exactly twice the coarse dims.
DepthMap upsample_init(const DepthMap& coarse);

// Candidate sets for the red-black sweep: for pixels of `parity`
// (parity of x+y) the incumbent depth plus the 4-neighborhood depths;
// other pixels keep only their incumbent.
CandidateGrid propagate(const DepthMap& depth, int parity);

// Appends uniform samples around the incumbent to bring active-parity
// pixels up to hypotheses_per_pixel candidates. The search half-width
// starts at (depth_max - depth_min) / 4 and halves every round.
void random_perturbation(const DepthMap& depth, int round,
                         const PatchMatchConfig& config, int level, int parity,
                         double depth_min, double depth_max,
                         CandidateGrid* candidates);

// Per-pixel argmin over the candidates of the mean (1 - NCC) cost across
// source views. Pixels whose best hypothesis has < 50% in-bounds window
// samples in every source are marked invalid. cost_out receives the
// selected per-pixel cost.
DepthMap evaluate(const CalibratedView& ref,
                  const std::vector<CalibratedView>& sources,
                  const CandidateGrid& candidates,
                  const PatchMatchConfig& config, GridD* cost_out,
                  int threads = 1);

// Observer called after every evaluation round with the current level
// (0 = finest) and the selected per-pixel costs at that level.
using RoundObserver =
    std::function<void(int level, int round_in_level, const GridD& best_cost)>;

// Full coarse-to-fine loop. Output is at half the input resolution.
DepthMap run(const CalibratedView& ref,
             const std::vector<CalibratedView>& sources,
             const PatchMatchConfig& config, int threads = 1,
             const RoundObserver& observer = nullptr);

// The view pyramid run() matches against: level 0 is the half-resolution
// view, each further level halves again. Exposed for refinement and tests.
CalibratedView downsample_view(const CalibratedView& view, int factor);

// Mean (1 - NCC) matching cost of the window around (x, y) in ref against
// the sources at the given depth; kWorstCost when no source has enough
// in-bounds samples (in_any_source set to false in that case).
double ncc_cost(const CalibratedView& ref,
                const std::vector<HomographyWarper>& warpers,
                const std::vector<const GridD*>& src_images, int x, int y,
                double depth, int window, bool* in_any_source);

}  // namespace bimvs
