#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "pitchtrack/errors.hpp"
#include "pitchtrack/heatmap.hpp"
#include "pitchtrack/types.hpp"

namespace pitchtrack {

// Planar projective map. Invertible by construction; scaled so m(2,2) = 1
// whenever that entry is nonzero.
struct Homography {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

  static Homography identity() { return {}; }
  // Validates invertibility and normalizes. Throws DegenerateConfiguration.
  static Homography from_matrix(const Eigen::Matrix3d& m);
  static Homography translation(double tx, double ty);
  static Homography scaling(double sx, double sy);

  Homography inverse() const;
  // this ∘ other: applies `other` first.
  Homography compose(const Homography& other) const;
};

// Applies h to a point of the source plane. Throws PointAtInfinity when the
// homogeneous divisor vanishes.
Vec2 project(const Homography& h, const Vec2& p);

inline PixelPoint project(const Homography& ground_to_image, const WorldPoint& p) {
  return PixelPoint::from(project(ground_to_image, p.vec()));
}
inline WorldPoint project(const Homography& image_to_ground, const PixelPoint& p) {
  return WorldPoint::from(project(image_to_ground, p.vec()));
}

// Normalized DLT from >= 4 correspondences src[i] -> dst[i]. Throws
// DegenerateConfiguration when the system is rank-deficient (e.g. collinear
// source points).
Homography estimate_homography(std::span<const Vec2> src,
                               std::span<const Vec2> dst);

// Inverse-mapping warp: every cell center of `grid` is pulled back through
// h^-1 and sampled bilinearly from src; samples outside src are zero.
// h maps src-plane coordinates to out-plane coordinates.
Heatmap warp_heatmap(const Heatmap& src, const Homography& h,
                     const GridSpec& grid);

}  // namespace pitchtrack
