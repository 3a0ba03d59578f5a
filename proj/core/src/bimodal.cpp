#include "bimvs/bimodal.hpp"

#include <cmath>

namespace bimvs {

namespace {
constexpr double kEdgeMargin = 1e-6;
}

bool BimodalLaplacian::is_valid() const {
  return alpha >= 0 && alpha <= 1 && sigma1 > 0 && sigma2 > 0 &&
         std::isfinite(mu1) && std::isfinite(mu2) &&
         std::isfinite(sigma1) && std::isfinite(sigma2);
}

double density(double x, const BimodalLaplacian& t) {
  const double term1 =
      t.alpha / (2 * t.sigma1) * std::exp(-std::abs(x - t.mu1) / t.sigma1);
  const double term2 = (1 - t.alpha) / (2 * t.sigma2) *
                       std::exp(-std::abs(x - t.mu2) / t.sigma2);
  return term1 + term2;
}

std::pair<double, double> responsibility(const BimodalLaplacian& t) {
  return {t.alpha / t.sigma1, (1 - t.alpha) / t.sigma2};
}

DepthMap collapse(const BimodalDepthMap& map) {
  DepthMap out(map.height(), map.width(), 0.0, true);
  for (std::size_t i = 0; i < map.grid.size(); ++i) {
    const auto& t = map.grid[i];
    const auto [r1, r2] = responsibility(t);
    out.depth[i] = r1 >= r2 ? t.mu1 : t.mu2;
  }
  return out;
}

double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigma_from_raw(double raw) { return kSigmaFloor + softplus(raw); }

double raw_from_sigma(double sigma) {
  const double y = sigma - kSigmaFloor;
  // inverse softplus
  return y + std::log(-std::expm1(-y));
}

double dsigma_draw(double raw) { return sigmoid(raw); }

double alpha_from_raw(double raw) {
  return kAlphaMargin + (1 - 2 * kAlphaMargin) * sigmoid(raw);
}

double raw_from_alpha(double alpha) {
  const double s = (alpha - kAlphaMargin) / (1 - 2 * kAlphaMargin);
  const double c = std::fmin(std::fmax(s, 1e-3), 1 - 1e-3);
  return std::log(c / (1 - c));
}

double dalpha_draw(double raw) {
  const double s = sigmoid(raw);
  return (1 - 2 * kAlphaMargin) * s * (1 - s);
}

double edge_from_raw(double raw) {
  return kEdgeMargin + (1 - 2 * kEdgeMargin) * sigmoid(raw);
}

double raw_from_edge(double edge) {
  const double s = (edge - kEdgeMargin) / (1 - 2 * kEdgeMargin);
  // Keep pre-images of saturated warm starts inside the live part of the
  // logistic so gradient descent can still move them.
  const double c = std::fmin(std::fmax(s, 1e-3), 1 - 1e-3);
  return std::log(c / (1 - c));
}

double dedge_draw(double raw) {
  const double s = sigmoid(raw);
  return (1 - 2 * kEdgeMargin) * s * (1 - s);
}

}  // namespace bimvs
