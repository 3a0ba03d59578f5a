#include <cmath>
#include <limits>
#include <random>

#include "bimvs/discontinuity.hpp"
#include "bimvs/eval.hpp"
#include "doctest.h"

using namespace bimvs;

namespace {

PointCloud cloud_of(const std::vector<Vec3>& points) {
  PointCloud c;
  c.points = points;
  c.colors.assign(points.size(), Vec3(0.5, 0.5, 0.5));
  c.view_ids.assign(points.size(), 0);
  c.support.assign(points.size(), 1);
  return c;
}

// O(n^2) reference implementations.
double brute_accuracy(const PointCloud& a, const PointCloud& b, double cap) {
  double sum = 0;
  int n = 0;
  for (const Vec3& p : a.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : b.points) best = std::min(best, (p - q).norm());
    if (best > cap) continue;
    sum += best;
    ++n;
  }
  return n > 0 ? sum / n : 0.0;
}

PctMetrics brute_pct(const PointCloud& a, const PointCloud& b, double thr) {
  const auto frac = [&](const PointCloud& from, const PointCloud& to) {
    int hits = 0;
    for (const Vec3& p : from.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& q : to.points) best = std::min(best, (p - q).norm());
      if (best <= thr) ++hits;
    }
    return 100.0 * hits / from.points.size();
  };
  PctMetrics m;
  m.precision_pct = frac(a, b);
  m.recall_pct = frac(b, a);
  m.fscore = m.precision_pct + m.recall_pct > 0
                 ? 2 * m.precision_pct * m.recall_pct /
                       (m.precision_pct + m.recall_pct)
                 : 0.0;
  return m;
}

PointCloud random_cloud(std::mt19937& rng, int n, double extent) {
  std::uniform_real_distribution<double> u(-extent, extent);
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  return cloud_of(pts);
}

}  // namespace

TEST_CASE("cloud_accuracy: identical clouds score zero") {
  const PointCloud c = cloud_of({{0, 0, 0}, {1, 1, 1}, {2, 0, 1}});
  CHECK(cloud_accuracy(c, c, 20.0) == 0.0);
}

TEST_CASE("cloud_accuracy: uniform translation scores the offset") {
  const PointCloud a = cloud_of({{0, 0, 0}, {5, 0, 0}, {0, 5, 0}});
  PointCloud b = a;
  for (Vec3& p : b.points) p.x() += 0.25;
  CHECK(cloud_accuracy(b, a, 20.0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("cloud_accuracy: 5-point clouds match brute force bit-exactly") {
  const PointCloud recon =
      cloud_of({{0, 0, 0}, {1, 0, 0}, {0, 2, 0}, {3, 3, 3}, {-1, -1, 0}});
  const PointCloud ref =
      cloud_of({{0.1, 0, 0}, {1, 1, 0}, {2.5, 3, 3}, {0, 0, -1}, {4, 4, 4}});
  CHECK(cloud_accuracy(recon, ref, 20.0) == brute_accuracy(recon, ref, 20.0));
}

TEST_CASE("cloud_accuracy: distances above the cap are excluded") {
  const PointCloud recon = cloud_of({{0, 0, 0}, {100, 0, 0}});
  const PointCloud ref = cloud_of({{0.5, 0, 0}});
  CHECK(cloud_accuracy(recon, ref, 20.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("cloud_completeness: superset reconstruction scores zero") {
  const PointCloud ref = cloud_of({{0, 0, 0}, {1, 1, 1}});
  const PointCloud recon = cloud_of({{0, 0, 0}, {1, 1, 1}, {9, 9, 9}});
  CHECK(cloud_completeness(recon, ref, 20.0) == 0.0);
}

TEST_CASE("cloud metrics: accuracy(A,B) equals completeness(B,A)") {
  std::mt19937 rng(15);
  const PointCloud a = random_cloud(rng, 30, 5.0);
  const PointCloud b = random_cloud(rng, 40, 5.0);
  CHECK(cloud_accuracy(a, b, 20.0) == cloud_completeness(b, a, 20.0));
}

TEST_CASE("cloud metrics: empty cloud throws") {
  const PointCloud c = cloud_of({{0, 0, 0}});
  const PointCloud empty;
  CHECK_THROWS_AS(cloud_accuracy(empty, c, 20.0), EmptyCloud);
  CHECK_THROWS_AS(cloud_accuracy(c, empty, 20.0), EmptyCloud);
  CHECK_THROWS_AS(cloud_pct_metrics(c, empty, 0.5), EmptyCloud);
}

TEST_CASE("cloud metrics: random <=50 point clouds match brute force") {
  std::mt19937 rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud a = random_cloud(rng, 50, 8.0);
    const PointCloud b = random_cloud(rng, 37, 8.0);
    CHECK(cloud_accuracy(a, b, 20.0) == brute_accuracy(a, b, 20.0));
    CHECK(cloud_completeness(a, b, 20.0) == brute_accuracy(b, a, 20.0));
    const PctMetrics fast = cloud_pct_metrics(a, b, 2.0);
    const PctMetrics slow = brute_pct(a, b, 2.0);
    CHECK(fast.precision_pct == slow.precision_pct);
    CHECK(fast.recall_pct == slow.recall_pct);
    CHECK(fast.fscore == slow.fscore);
  }
}

TEST_CASE("cloud_pct_metrics: identical and disjoint clouds") {
  const PointCloud c = cloud_of({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}});
  const PctMetrics same = cloud_pct_metrics(c, c, 0.01);
  CHECK(same.precision_pct == 100.0);
  CHECK(same.recall_pct == 100.0);
  CHECK(same.fscore == 100.0);

  PointCloud far = c;
  for (Vec3& p : far.points) p += Vec3(1000, 0, 0);
  const PctMetrics none = cloud_pct_metrics(far, c, 0.01);
  CHECK(none.precision_pct == 0.0);
  CHECK(none.recall_pct == 0.0);
  CHECK(none.fscore == 0.0);
}

TEST_CASE("cloud_pct_metrics: harmonic mean of a half-covered recon") {
  // Recon: 2 points near the reference, 2 far; reference fully covered.
  const PointCloud ref = cloud_of({{0, 0, 0}, {1, 0, 0}});
  const PointCloud recon =
      cloud_of({{0, 0, 0}, {1, 0, 0}, {50, 0, 0}, {60, 0, 0}});
  const PctMetrics m = cloud_pct_metrics(recon, ref, 0.5);
  CHECK(m.precision_pct == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(m.recall_pct == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(m.fscore == doctest::Approx(200.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("cloud_pct_metrics: monotone in the threshold") {
  std::mt19937 rng(35);
  const PointCloud a = random_cloud(rng, 25, 4.0);
  const PointCloud b = random_cloud(rng, 25, 4.0);
  double last_p = 0, last_r = 0;
  for (double thr : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const PctMetrics m = cloud_pct_metrics(a, b, thr);
    CHECK(m.precision_pct >= last_p);
    CHECK(m.recall_pct >= last_r);
    last_p = m.precision_pct;
    last_r = m.recall_pct;
  }
}

TEST_CASE("evaluate_clouds: overall is the mean of acc and comp") {
  std::mt19937 rng(45);
  const PointCloud a = random_cloud(rng, 20, 4.0);
  const PointCloud b = random_cloud(rng, 20, 4.0);
  const CloudMetrics m = evaluate_clouds(a, b, 20.0, 1.0);
  CHECK(m.overall ==
        doctest::Approx((m.accuracy + m.completeness) / 2).epsilon(1e-15));
}

TEST_CASE("depth_metrics: perfect estimate scores zero") {
  GroundTruth gt(6, 6, 0.0, true);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) gt.depth(y, x) = 2.0 + 0.1 * x;
  const DepthMetrics m = depth_metrics(gt, gt, 8.0);
  CHECK(m.mae == 0.0);
  CHECK(m.error_ratio == 0.0);
  CHECK(m.boundary_mae == 0.0);
  CHECK(m.smooth_mae == 0.0);
}

TEST_CASE("depth_metrics: uniform error above the threshold") {
  GroundTruth gt(5, 5, 100.0, true);
  DepthMap est(5, 5, 110.0, true);
  const DepthMetrics m = depth_metrics(est, gt, 8.0);
  CHECK(m.mae == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(m.error_ratio == 1.0);
}

TEST_CASE("depth_metrics: error_ratio comparison is strict") {
  GroundTruth gt(5, 5, 100.0, true);
  DepthMap est(5, 5, 108.0, true);  // error exactly 8
  CHECK(depth_metrics(est, gt, 8.0).error_ratio == 0.0);
}

TEST_CASE("depth_metrics: region split matches a scalar oracle") {
  // GT step of height 10: |laplacian| = 10 > 5 flags the two columns
  // beside the step as boundary.
  GroundTruth gt(5, 8, 0.0, true);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 8; ++x) gt.depth(y, x) = x < 4 ? 20.0 : 30.0;
  DepthMap est = gt;
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (std::size_t i = 0; i < est.depth.size(); ++i) est.depth[i] += u(rng);
  const DepthMetrics m = depth_metrics(est, gt, 8.0);

  const GridD lap = laplacian(gt);
  double bsum = 0, ssum = 0, all = 0;
  int bn = 0, sn = 0;
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 8; ++x) {
      const double err = std::abs(est.depth(y, x) - gt.depth(y, x));
      all += err;
      if (std::abs(lap(y, x)) > 5.0) {
        bsum += err;
        ++bn;
      } else {
        ssum += err;
        ++sn;
      }
    }
  }
  REQUIRE(bn == 6);
  CHECK(m.boundary_mae == doctest::Approx(bsum / bn).epsilon(1e-12));
  CHECK(m.smooth_mae == doctest::Approx(ssum / sn).epsilon(1e-12));
  CHECK(m.mae == doctest::Approx(all / 40).epsilon(1e-12));
  // Count-weighted recombination reproduces the whole-map MAE.
  CHECK(std::abs((m.boundary_mae * bn + m.smooth_mae * sn) / 40 - m.mae) <
        1e-12);
}

TEST_CASE("depth_metrics: preconditions") {
  GroundTruth gt(5, 5, 2.0, true);
  CHECK_THROWS_AS(depth_metrics(DepthMap(4, 5, 2.0, true), gt, 8.0),
                  DimensionMismatch);
  CHECK_THROWS_AS(depth_metrics(DepthMap(5, 5, 2.0, false), gt, 8.0),
                  NoValidPixels);
}

TEST_CASE("depth_metrics: default boundary threshold is 5") {
  CHECK(kBoundaryLapThreshold == 5.0);
}
