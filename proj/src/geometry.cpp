#include "pitchtrack/geometry.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace pitchtrack {

namespace {

constexpr double kDivisorEps = 1e-12;

Eigen::Matrix3d normalized(Eigen::Matrix3d m) {
  if (m(2, 2) != 0.0) m /= m(2, 2);
  return m;
}

// Hartley conditioning: translate centroid to origin, scale mean distance
// to sqrt(2).
Eigen::Matrix3d conditioning_transform(std::span<const Vec2> pts) {
  Vec2 c = Vec2::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += (p - c).norm();
  mean_dist /= static_cast<double>(pts.size());
  const double s = mean_dist > 0.0 ? std::sqrt(2.0) / mean_dist : 1.0;
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 0) = s;
  t(1, 1) = s;
  t(0, 2) = -s * c.x();
  t(1, 2) = -s * c.y();
  return t;
}

}  // namespace

Homography Homography::from_matrix(const Eigen::Matrix3d& m) {
  if (std::abs(m.determinant()) <= 1e-12)
    throw DegenerateConfiguration("homography matrix is not invertible");
  Homography h;
  h.m = normalized(m);
  return h;
}

Homography Homography::translation(double tx, double ty) {
  Homography h;
  h.m(0, 2) = tx;
  h.m(1, 2) = ty;
  return h;
}

Homography Homography::scaling(double sx, double sy) {
  Homography h;
  h.m(0, 0) = sx;
  h.m(1, 1) = sy;
  return h;
}

Homography Homography::inverse() const {
  return from_matrix(m.inverse().eval());
}

Homography Homography::compose(const Homography& other) const {
  return from_matrix((m * other.m).eval());
}

Vec2 project(const Homography& h, const Vec2& p) {
  const Eigen::Vector3d q = h.m * Eigen::Vector3d(p.x(), p.y(), 1.0);
  if (std::abs(q.z()) <= kDivisorEps)
    throw PointAtInfinity("homogeneous divisor vanished at (" +
                          std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")");
  return q.hnormalized();
}

Homography estimate_homography(std::span<const Vec2> src,
                               std::span<const Vec2> dst) {
  if (src.size() != dst.size() || src.size() < 4)
    throw DegenerateConfiguration("need at least 4 correspondences");
  const int n = static_cast<int>(src.size());

  const Eigen::Matrix3d ts = conditioning_transform(src);
  const Eigen::Matrix3d td = conditioning_transform(dst);

  Eigen::MatrixXd a(2 * n, 9);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d s = ts * Eigen::Vector3d(src[i].x(), src[i].y(), 1.0);
    const Eigen::Vector3d d = td * Eigen::Vector3d(dst[i].x(), dst[i].y(), 1.0);
    const double x = s.x() / s.z(), y = s.y() / s.z();
    const double u = d.x() / d.z(), v = d.y() / d.z();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // Rank < 8 means the correspondences do not pin down a homography.
  if (sv(0) <= 0.0 || sv(7) / sv(0) < 1e-10)
    throw DegenerateConfiguration("rank-deficient design matrix");

  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return Homography::from_matrix((td.inverse() * hn * ts).eval());
}

Heatmap warp_heatmap(const Heatmap& src, const Homography& h,
                     const GridSpec& grid) {
  const Homography inv = h.inverse();
  Heatmap out(grid);
  for (int iy = 0; iy < grid.height; ++iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      const WorldPoint center = grid.cell_center(ix, iy);
      Vec2 back;
      try {
        back = project(inv, center.vec());
      } catch (const PointAtInfinity&) {
        continue;  // cell pulls back to infinity, no evidence
      }
      const Vec2 cc = src.grid.to_cell(WorldPoint::from(back));
      out.at(ix, iy) = sample_bilinear(src.values, cc.x(), cc.y());
    }
  }
  return out;
}

}  // namespace pitchtrack
