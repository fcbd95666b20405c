#include "pitchtrack/geometry.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pitchtrack;

namespace {

// From-scratch reference: solves the 8x8 linear system for a homography
// with h33 = 1 by Gaussian elimination with partial pivoting. Kept free of
// any Eigen solver so it is independent of the SVD path under test.
Eigen::Matrix3d solve_homography_reference(const std::vector<Vec2>& src,
                                           const std::vector<Vec2>& dst) {
  double a[8][9] = {};
  for (int k = 0; k < 4; ++k) {
    const double x = src[k].x(), y = src[k].y();
    const double u = dst[k].x(), v = dst[k].y();
    double* r1 = a[2 * k];
    double* r2 = a[2 * k + 1];
    r1[0] = x; r1[1] = y; r1[2] = 1; r1[6] = -u * x; r1[7] = -u * y; r1[8] = u;
    r2[3] = x; r2[4] = y; r2[5] = 1; r2[6] = -v * x; r2[7] = -v * y; r2[8] = v;
  }
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    for (int c = 0; c < 9; ++c) std::swap(a[col][c], a[pivot][c]);
    for (int r = 0; r < 8; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 9; ++c) a[r][c] -= f * a[col][c];
    }
  }
  Eigen::Matrix3d h;
  h << a[0][8] / a[0][0], a[1][8] / a[1][1], a[2][8] / a[2][2],
       a[3][8] / a[3][3], a[4][8] / a[4][4], a[5][8] / a[5][5],
       a[6][8] / a[6][6], a[7][8] / a[7][7], 1.0;
  return h;
}

Homography random_homography(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> small(-0.15, 0.15);
  std::uniform_real_distribution<double> shift(-2.0, 2.0);
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 0) += small(rng);
  m(0, 1) += small(rng);
  m(1, 0) += small(rng);
  m(1, 1) += small(rng);
  m(0, 2) = shift(rng);
  m(1, 2) = shift(rng);
  m(2, 0) = small(rng) * 0.02;
  m(2, 1) = small(rng) * 0.02;
  return Homography::from_matrix(m);
}

Heatmap gaussian_blob_map(const GridSpec& grid, const WorldPoint& at, double sigma,
                          double peak) {
  Heatmap h(grid);
  for (int iy = 0; iy < grid.height; ++iy)
    for (int ix = 0; ix < grid.width; ++ix) {
      const WorldPoint c = grid.cell_center(ix, iy);
      const double d2 = (c.vec() - at.vec()).squaredNorm();
      h.at(ix, iy) = static_cast<float>(peak * std::exp(-d2 / (2 * sigma * sigma)));
    }
  return h;
}

WorldPoint centroid(const Heatmap& h) {
  double wsum = 0, xsum = 0, ysum = 0;
  for (int iy = 0; iy < h.grid.height; ++iy)
    for (int ix = 0; ix < h.grid.width; ++ix) {
      const double v = h.at(ix, iy);
      const WorldPoint c = h.grid.cell_center(ix, iy);
      wsum += v;
      xsum += v * c.x;
      ysum += v * c.y;
    }
  return {xsum / wsum, ysum / wsum};
}

}  // namespace

TEST(Project, Identity) {
  const Vec2 out = project(Homography::identity(), Vec2(3.0, 4.0));
  EXPECT_DOUBLE_EQ(out.x(), 3.0);
  EXPECT_DOUBLE_EQ(out.y(), 4.0);
}

TEST(Project, PureTranslation) {
  const Vec2 out = project(Homography::translation(1.0, 2.0), Vec2(0.0, 0.0));
  EXPECT_DOUBLE_EQ(out.x(), 1.0);
  EXPECT_DOUBLE_EQ(out.y(), 2.0);
}

TEST(Project, MatchesIndependentSolver) {
  const std::vector<Vec2> src = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  const std::vector<Vec2> dst = {{0, 0}, {2, 0}, {0, 2}, {2.5, 2.5}};
  const Homography h = estimate_homography(src, dst);

  const Vec2 out = project(h, Vec2(0.5, 0.5));
  // Frozen value, precomputed with the elimination reference below.
  EXPECT_NEAR(out.x(), 1.0, 1e-9);
  EXPECT_NEAR(out.y(), 1.0, 1e-9);

  const Eigen::Matrix3d ref = solve_homography_reference(src, dst);
  const Eigen::Vector3d q = ref * Eigen::Vector3d(0.5, 0.5, 1.0);
  EXPECT_NEAR(out.x(), q.x() / q.z(), 1e-9);
  EXPECT_NEAR(out.y(), q.y() / q.z(), 1e-9);
}

TEST(Project, ThrowsAtInfinity) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(2, 0) = -1.0;  // w = 1 - x vanishes at x = 1
  const Homography h = Homography::from_matrix(m);
  EXPECT_THROW(project(h, Vec2(1.0, 0.5)), PointAtInfinity);
}

TEST(Homography, RejectsSingularMatrix) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  EXPECT_THROW(Homography::from_matrix(m), DegenerateConfiguration);
}

TEST(EstimateHomography, IdentityFromFourPoints) {
  const std::vector<Vec2> pts = {{0, 0}, {4, 0}, {0, 3}, {4, 3}};
  const Homography h = estimate_homography(pts, pts);
  EXPECT_LT((h.m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(EstimateHomography, UniformScale) {
  const std::vector<Vec2> src = {{0, 0}, {4, 0}, {0, 3}, {4, 3}};
  std::vector<Vec2> dst;
  for (const auto& p : src) dst.push_back(2.0 * p);
  const Homography h = estimate_homography(src, dst);
  Eigen::Matrix3d expect = Eigen::Matrix3d::Identity();
  expect(0, 0) = expect(1, 1) = 2.0;
  EXPECT_LT((h.m - expect).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(EstimateHomography, RecoversKnownMapping) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Homography truth = random_homography(rng);
    std::vector<Vec2> src, dst;
    for (int i = 0; i < 6; ++i) {
      const Vec2 p(coord(rng), coord(rng));
      src.push_back(p);
      dst.push_back(project(truth, p));
    }
    const Homography h = estimate_homography(src, dst);

    EXPECT_LT((h.m - truth.m).cwiseAbs().maxCoeff(), 1e-6);
    for (int i = 0; i < 10; ++i) {
      const Vec2 p(coord(rng), coord(rng));
      EXPECT_LT((project(h, p) - project(truth, p)).norm(), 1e-6);
    }
  }
}

TEST(EstimateHomography, ExactInputsReprojectBelowTolerance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  const Homography truth = random_homography(rng);
  std::vector<Vec2> src, dst;
  for (int i = 0; i < 8; ++i) {
    const Vec2 p(coord(rng), coord(rng));
    src.push_back(p);
    dst.push_back(project(truth, p));
  }
  const Homography h = estimate_homography(src, dst);
  double rms = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i)
    rms += (project(h, src[i]) - dst[i]).squaredNorm();
  rms = std::sqrt(rms / src.size());
  EXPECT_LT(rms, 1e-6);
}

TEST(EstimateHomography, CollinearSourceThrows) {
  const std::vector<Vec2> src = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  const std::vector<Vec2> dst = {{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 2}};
  EXPECT_THROW(estimate_homography(src, dst), DegenerateConfiguration);
}

TEST(EstimateHomography, TooFewPointsThrows) {
  const std::vector<Vec2> pts = {{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(estimate_homography(pts, pts), DegenerateConfiguration);
}

TEST(Project, RoundTripProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Homography h = random_homography(rng);
    const Homography inv = h.inverse();
    const Vec2 p(coord(rng), coord(rng));
    const Vec2 back = project(inv, project(h, p));
    ASSERT_LT((back - p).norm(), 1e-9);
  }
}

TEST(WarpHeatmap, IdentityKeepsValues) {
  GridSpec grid;
  grid.origin = {0.05, 0.05};
  grid.resolution = 0.1;
  grid.width = 60;
  grid.height = 40;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> val(0.0f, 1.0f);
  Heatmap src(grid);
  for (int iy = 0; iy < grid.height; ++iy)
    for (int ix = 0; ix < grid.width; ++ix) src.at(ix, iy) = val(rng);

  const Heatmap out = warp_heatmap(src, Homography::identity(), grid);
  EXPECT_LT((out.values - src.values).abs().maxCoeff(), 1e-6f);
}

TEST(WarpHeatmap, ZeroStaysZero) {
  GridSpec grid;
  grid.origin = {0.05, 0.05};
  grid.resolution = 0.1;
  grid.width = 30;
  grid.height = 30;
  const Heatmap out = warp_heatmap(Heatmap(grid), Homography::scaling(2.0, 0.5), grid);
  EXPECT_EQ(out.values.abs().maxCoeff(), 0.0f);
}

TEST(WarpHeatmap, TranslationMovesBlobCentroid) {
  GridSpec grid;
  grid.origin = {0.05, 0.05};
  grid.resolution = 0.1;
  grid.width = 120;
  grid.height = 100;
  const Heatmap src = gaussian_blob_map(grid, {4.0, 5.0}, 0.4, 1.0);
  const WorldPoint before = centroid(src);

  const Homography h = Homography::translation(2.0, -1.5);
  const Heatmap out = warp_heatmap(src, h, grid);
  const WorldPoint after = centroid(out);

  // Half a cell of slack on top of the analytic shift.
  EXPECT_NEAR(after.x - before.x, 2.0, 0.05);
  EXPECT_NEAR(after.y - before.y, -1.5, 0.05);
}

TEST(WarpHeatmap, StaysWithinSourceRange) {
  GridSpec grid;
  grid.origin = {0.05, 0.05};
  grid.resolution = 0.1;
  grid.width = 50;
  grid.height = 50;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<float> val(0.0f, 2.0f);
  Heatmap src(grid);
  for (int iy = 0; iy < grid.height; ++iy)
    for (int ix = 0; ix < grid.width; ++ix) src.at(ix, iy) = val(rng);
  const float src_max = src.values.maxCoeff();

  for (int trial = 0; trial < 5; ++trial) {
    const Heatmap out = warp_heatmap(src, random_homography(rng), grid);
    EXPECT_GE(out.values.minCoeff(), 0.0f);
    EXPECT_LE(out.values.maxCoeff(), src_max + 1e-6f);
  }
}
