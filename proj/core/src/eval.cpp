#include "bimvs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bimvs/discontinuity.hpp"
#include "bimvs/parallel.hpp"

namespace bimvs {

std::size_t PointIndex::CellHash::operator()(const Cell& c) const {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(c.x) * 0x9e3779b1);
  h = hash_combine(h, static_cast<std::uint64_t>(c.y));
  h = hash_combine(h, static_cast<std::uint64_t>(c.z));
  return static_cast<std::size_t>(h);
}

PointIndex::Cell PointIndex::cell_of(const Vec3& p) const {
  return Cell{static_cast<int>(std::floor(p.x() / cell_size_)),
              static_cast<int>(std::floor(p.y() / cell_size_)),
              static_cast<int>(std::floor(p.z() / cell_size_))};
}

PointIndex::PointIndex(const std::vector<Vec3>& points, double cell_size)
    : points_(points), cell_size_(cell_size) {
  if (points_.empty()) throw EmptyCloud();
  if (!(cell_size > 0)) throw InvalidParameter("cell size must be positive");
  bool first = true;
  for (int i = 0; i < static_cast<int>(points_.size()); ++i) {
    const Cell c = cell_of(points_[i]);
    cells_[c].push_back(i);
    if (first) {
      min_cell_ = max_cell_ = c;
      first = false;
    } else {
      min_cell_ = {std::min(min_cell_.x, c.x), std::min(min_cell_.y, c.y),
                   std::min(min_cell_.z, c.z)};
      max_cell_ = {std::max(max_cell_.x, c.x), std::max(max_cell_.y, c.y),
                   std::max(max_cell_.z, c.z)};
    }
  }
}

double PointIndex::nearest_distance(const Vec3& query) const {
  const Cell q = cell_of(query);
  double best = std::numeric_limits<double>::infinity();

  const int max_span =
      std::max({max_cell_.x - min_cell_.x, max_cell_.y - min_cell_.y,
                max_cell_.z - min_cell_.z});
  // Radius needed to reach the whole index from the query cell.
  const int max_ring =
      std::max({std::abs(q.x - min_cell_.x), std::abs(max_cell_.x - q.x),
                std::abs(q.y - min_cell_.y), std::abs(max_cell_.y - q.y),
                std::abs(q.z - min_cell_.z), std::abs(max_cell_.z - q.z),
                max_span}) + 1;

  for (int r = 0; r <= max_ring; ++r) {
    // Points in the shell at Chebyshev cell radius r are at least
    // (r - 1) * cell away; stop once the incumbent beats that bound.
    if (best <= (r - 1) * cell_size_) break;
    // Once a shell holds more cells than the index, scanning the
    // remaining points directly is cheaper than walking empty cells.
    const std::int64_t rl = r;
    const std::int64_t shell_cells =
        r == 0 ? 1
               : (2 * rl + 1) * (2 * rl + 1) * (2 * rl + 1) -
                     (2 * rl - 1) * (2 * rl - 1) * (2 * rl - 1);
    if (shell_cells > static_cast<std::int64_t>(cells_.size())) {
      for (const auto& [cell, indices] : cells_) {
        if (std::max({std::abs(cell.x - q.x), std::abs(cell.y - q.y),
                      std::abs(cell.z - q.z)}) < r) {
          continue;  // already visited in an earlier shell
        }
        for (const int i : indices) {
          const double d = (points_[i] - query).norm();
          if (d < best) best = d;
        }
      }
      break;
    }
    for (int dz = -r; dz <= r; ++dz) {
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r) {
            continue;
          }
          const Cell c{q.x + dx, q.y + dy, q.z + dz};
          if (c.x < min_cell_.x || c.x > max_cell_.x || c.y < min_cell_.y ||
              c.y > max_cell_.y || c.z < min_cell_.z || c.z > max_cell_.z) {
            continue;
          }
          const auto it = cells_.find(c);
          if (it == cells_.end()) continue;
          for (const int i : it->second) {
            const double d = (points_[i] - query).norm();
            if (d < best) best = d;
          }
        }
      }
    }
  }
  return best;
}

double cloud_accuracy(const PointCloud& recon, const PointCloud& reference,
                      double outlier_cap) {
  if (recon.points.empty() || reference.points.empty()) throw EmptyCloud();
  const PointIndex index(reference.points, outlier_cap);
  double sum = 0;
  std::int64_t n = 0;
  for (const auto& p : recon.points) {
    const double d = index.nearest_distance(p);
    if (d > outlier_cap) continue;
    sum += d;
    ++n;
  }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

double cloud_completeness(const PointCloud& recon, const PointCloud& reference,
                          double outlier_cap) {
  return cloud_accuracy(reference, recon, outlier_cap);
}

PctMetrics cloud_pct_metrics(const PointCloud& recon,
                             const PointCloud& reference, double threshold) {
  if (recon.points.empty() || reference.points.empty()) throw EmptyCloud();
  if (!(threshold > 0)) throw InvalidParameter("threshold must be positive");

  const auto pct_within = [threshold](const std::vector<Vec3>& from,
                                      const std::vector<Vec3>& to) {
    const PointIndex index(to, threshold);
    std::int64_t within = 0;
    for (const auto& p : from) {
      if (index.nearest_distance(p) <= threshold) ++within;
    }
    return 100.0 * static_cast<double>(within) /
           static_cast<double>(from.size());
  };

  PctMetrics out;
  out.precision_pct = pct_within(recon.points, reference.points);
  out.recall_pct = pct_within(reference.points, recon.points);
  const double pr = out.precision_pct + out.recall_pct;
  out.fscore = pr > 0 ? 2.0 * out.precision_pct * out.recall_pct / pr : 0.0;
  return out;
}

CloudMetrics evaluate_clouds(const PointCloud& recon,
                             const PointCloud& reference, double outlier_cap,
                             double pct_threshold) {
  CloudMetrics m;
  m.accuracy = cloud_accuracy(recon, reference, outlier_cap);
  m.completeness = cloud_completeness(recon, reference, outlier_cap);
  m.overall = (m.accuracy + m.completeness) / 2.0;
  const PctMetrics pct = cloud_pct_metrics(recon, reference, pct_threshold);
  m.precision_pct = pct.precision_pct;
  m.recall_pct = pct.recall_pct;
  m.fscore = pct.fscore;
  return m;
}

DepthMetrics depth_metrics(const DepthMap& est, const GroundTruth& gt,
                           double error_threshold,
                           double boundary_lap_threshold) {
  if (est.height() != gt.height() || est.width() != gt.width()) {
    throw DimensionMismatch();
  }
  if (!(error_threshold > 0) || !(boundary_lap_threshold > 0)) {
    throw InvalidParameter("thresholds must be positive");
  }
  const GridD lap = laplacian(gt);

  double sum = 0, boundary_sum = 0, smooth_sum = 0;
  std::int64_t n = 0, n_boundary = 0, n_smooth = 0, n_above = 0;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (!gt.is_valid(y, x) || !est.is_valid(y, x)) continue;
      const double err = std::abs(est.depth(y, x) - gt.depth(y, x));
      sum += err;
      ++n;
      if (err > error_threshold) ++n_above;
      if (std::abs(lap(y, x)) > boundary_lap_threshold) {
        boundary_sum += err;
        ++n_boundary;
      } else {
        smooth_sum += err;
        ++n_smooth;
      }
    }
  }
  if (n == 0) throw NoValidPixels();

  DepthMetrics m;
  m.mae = sum / static_cast<double>(n);
  m.error_ratio = static_cast<double>(n_above) / static_cast<double>(n);
  m.boundary_mae =
      n_boundary > 0 ? boundary_sum / static_cast<double>(n_boundary) : 0.0;
  m.smooth_mae = n_smooth > 0 ? smooth_sum / static_cast<double>(n_smooth) : 0.0;
  return m;
}

}  // namespace bimvs
