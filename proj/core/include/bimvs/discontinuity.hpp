#pragma once

#include "bimvs/depth_map.hpp"
#include "bimvs/errors.hpp"
#include "bimvs/grid.hpp"

namespace bimvs {

// Discrete 4-neighbor Laplacian of depth. Border pixels and pixels whose
// 5-point stencil touches an invalid depth respond 0.
GridD laplacian(const DepthMap& depth);

// Mask where |laplacian(depth)| > tau.
BoundaryMask phi(const DepthMap& depth, double tau);
BoundaryMask phi_from_laplacian(const GridD& lap, double tau);

// omega(E) = exp(-beta * E), elementwise.
GridD smoothness_weight(const EdgeMap& edge, double beta);

// Default boundary threshold used for training-target masks:
// 0.5% of the reference view's depth range.
inline double default_tau(double depth_range) { return 0.005 * depth_range; }

inline constexpr double kDefaultBeta = 10.0;

}  // namespace bimvs
