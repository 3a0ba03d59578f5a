#pragma once

#include <unordered_map>
#include <vector>

#include "bimvs/depth_map.hpp"
#include "bimvs/errors.hpp"
#include "bimvs/fusion.hpp"

namespace bimvs {

// Uniform voxel-grid index for exact nearest-neighbor distances.
class PointIndex {
 public:
  PointIndex(const std::vector<Vec3>& points, double cell_size);

  // Exact distance to the nearest indexed point.
  double nearest_distance(const Vec3& query) const;

 private:
  struct Cell {
    int x, y, z;
    bool operator==(const Cell&) const = default;
  };
  struct CellHash {
    std::size_t operator()(const Cell& c) const;
  };

  Cell cell_of(const Vec3& p) const;

  std::vector<Vec3> points_;
  double cell_size_;
  Cell min_cell_{0, 0, 0}, max_cell_{0, 0, 0};
  std::unordered_map<Cell, std::vector<int>, CellHash> cells_;
};

inline constexpr double kDefaultOutlierCap = 20.0;   // DTU's 20 mm convention
inline constexpr double kBoundaryLapThreshold = 5.0;

// Mean nearest-neighbor distance from recon to reference; distances above
// outlier_cap are excluded from the mean.
double cloud_accuracy(const PointCloud& recon, const PointCloud& reference,
                      double outlier_cap);
// Mirror with the roles swapped.
double cloud_completeness(const PointCloud& recon, const PointCloud& reference,
                          double outlier_cap);

struct PctMetrics {
  double precision_pct = 0;
  double recall_pct = 0;
  double fscore = 0;
};
// Percentage of points within `threshold` of the other cloud, both ways,
// plus their harmonic mean.
PctMetrics cloud_pct_metrics(const PointCloud& recon,
                             const PointCloud& reference, double threshold);

struct CloudMetrics {
  double accuracy = 0;
  double completeness = 0;
  double overall = 0;   // (accuracy + completeness) / 2
  double precision_pct = 0;
  double recall_pct = 0;
  double fscore = 0;
};
CloudMetrics evaluate_clouds(const PointCloud& recon,
                             const PointCloud& reference, double outlier_cap,
                             double pct_threshold);

struct DepthMetrics {
  double mae = 0;
  double error_ratio = 0;     // fraction with error strictly above threshold
  double boundary_mae = 0;    // |laplacian(GT)| > boundary threshold
  double smooth_mae = 0;
};
DepthMetrics depth_metrics(const DepthMap& est, const GroundTruth& gt,
                           double error_threshold,
                           double boundary_lap_threshold = kBoundaryLapThreshold);

}  // namespace bimvs
