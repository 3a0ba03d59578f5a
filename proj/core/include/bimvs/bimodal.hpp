#pragma once

#include <utility>

#include "bimvs/depth_map.hpp"
#include "bimvs/grid.hpp"

namespace bimvs {

// Per-pixel two-component Laplace mixture over depth.
struct BimodalLaplacian {
  double alpha = 0.5;   // mixture weight of mode 1
  double mu1 = 0, mu2 = 0;
  double sigma1 = 1, sigma2 = 1;

  bool is_valid() const;
};

struct BimodalDepthMap {
  Grid<BimodalLaplacian> grid;

  BimodalDepthMap() = default;
  BimodalDepthMap(int height, int width) : grid(height, width) {}
  int height() const { return grid.height(); }
  int width() const { return grid.width(); }
};

// Mixture density p(x; theta), Laplace kernels.
double density(double x, const BimodalLaplacian& theta);

// (alpha / sigma1, (1 - alpha) / sigma2).
std::pair<double, double> responsibility(const BimodalLaplacian& theta);

// Per-pixel depth = mu of the higher-responsibility mode; ties pick mode 1.
// All output pixels are marked valid.
DepthMap collapse(const BimodalDepthMap& map);

// Positive/bounded reparameterizations used by optimizers. sigma is
// floor + softplus(raw); alpha and edge values are affine-squashed
// logistics so the bounds hold at every step with live gradients.
inline constexpr double kSigmaFloor = 1e-4;
inline constexpr double kAlphaMargin = 1e-4;

double sigmoid(double x);
double softplus(double x);

double sigma_from_raw(double raw);
double raw_from_sigma(double sigma);
double dsigma_draw(double raw);

double alpha_from_raw(double raw);
double raw_from_alpha(double alpha);
double dalpha_draw(double raw);

double edge_from_raw(double raw);
double raw_from_edge(double edge);
double dedge_draw(double raw);

}  // namespace bimvs
