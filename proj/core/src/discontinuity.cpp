#include "bimvs/discontinuity.hpp"

#include <cmath>

namespace bimvs {

GridD laplacian(const DepthMap& depth) {
  const int h = depth.height();
  const int w = depth.width();
  if (h < 3 || w < 3) throw ImageTooSmall("laplacian needs at least 3x3");
  GridD out(h, w, 0.0);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      if (!depth.is_valid(y, x) || !depth.is_valid(y - 1, x) ||
          !depth.is_valid(y + 1, x) || !depth.is_valid(y, x - 1) ||
          !depth.is_valid(y, x + 1)) {
        continue;
      }
      out(y, x) = depth.depth(y - 1, x) + depth.depth(y + 1, x) +
                  depth.depth(y, x - 1) + depth.depth(y, x + 1) -
                  4.0 * depth.depth(y, x);
    }
  }
  return out;
}

BoundaryMask phi_from_laplacian(const GridD& lap, double tau) {
  if (!(tau > 0)) throw NonPositiveTau();
  BoundaryMask mask(lap.height(), lap.width(), 0);
  for (std::size_t i = 0; i < lap.size(); ++i) {
    mask[i] = std::abs(lap[i]) > tau ? 1 : 0;
  }
  return mask;
}

BoundaryMask phi(const DepthMap& depth, double tau) {
  if (!(tau > 0)) throw NonPositiveTau();
  return phi_from_laplacian(laplacian(depth), tau);
}

GridD smoothness_weight(const EdgeMap& edge, double beta) {
  if (!(beta > 0)) throw NonPositiveBeta();
  GridD out(edge.height(), edge.width(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(-beta * edge.grid[i]);
  }
  return out;
}

}  // namespace bimvs
