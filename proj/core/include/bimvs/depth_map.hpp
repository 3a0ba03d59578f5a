#pragma once

#include "bimvs/grid.hpp"

namespace bimvs {

// Scalar depth grid with per-pixel validity.
struct DepthMap {
  GridD depth;
  GridU8 valid;

  DepthMap() = default;
  DepthMap(int height, int width, double fill = 0.0, bool validity = false)
      : depth(height, width, fill),
        valid(height, width, validity ? 1 : 0) {}

  int height() const { return depth.height(); }
  int width() const { return depth.width(); }
  bool is_valid(int y, int x) const { return valid(y, x) != 0; }
};

// Ground-truth depth shares the layout: depth plus a validity mask.
using GroundTruth = DepthMap;

// Edge probabilities E in [0, 1].
struct EdgeMap {
  GridD grid;

  EdgeMap() = default;
  EdgeMap(int height, int width, double fill = 0.0) : grid(height, width, fill) {}
  int height() const { return grid.height(); }
  int width() const { return grid.width(); }
};

using BoundaryMask = GridU8;

}  // namespace bimvs
