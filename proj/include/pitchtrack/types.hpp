#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>

namespace pitchtrack {

using Vec2 = Eigen::Vector2d;

// Ground-plane position in meters, pitch frame (origin at one corner flag).
struct WorldPoint {
  double x = 0.0;
  double y = 0.0;

  Vec2 vec() const { return {x, y}; }
  static WorldPoint from(const Vec2& v) { return {v.x(), v.y()}; }
};

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;

  Vec2 vec() const { return {u, v}; }
  static PixelPoint from(const Vec2& v) { return {v.x(), v.y()}; }
};

inline double distance(const WorldPoint& a, const WorldPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Pitch dimensions (meters) and the margin of the extended playable area
// that agents are allowed to occupy.
constexpr double kPitchLength = 105.0;
constexpr double kPitchWidth = 68.0;
constexpr double kPitchMargin = 5.0;

// Regular raster over a plane. `origin` is the plane position of the
// center of cell (0, 0); cell (ix, iy) is centered at
// origin + resolution * (ix, iy).
struct GridSpec {
  WorldPoint origin;
  double resolution = 0.1;  // meters per cell
  int width = 0;            // cells along x
  int height = 0;           // cells along y

  WorldPoint cell_center(int ix, int iy) const {
    return {origin.x + resolution * ix, origin.y + resolution * iy};
  }

  // Continuous cell coordinates; integer values land on cell centers.
  Vec2 to_cell(const WorldPoint& p) const {
    return {(p.x - origin.x) / resolution, (p.y - origin.y) / resolution};
  }

  // Index of the cell whose footprint contains p.
  std::pair<int, int> cell_of(const WorldPoint& p) const {
    const Vec2 c = to_cell(p);
    return {static_cast<int>(std::floor(c.x() + 0.5)),
            static_cast<int>(std::floor(c.y() + 0.5))};
  }

  bool contains_cell(int ix, int iy) const {
    return ix >= 0 && ix < width && iy >= 0 && iy < height;
  }

  bool operator==(const GridSpec& o) const {
    return origin.x == o.origin.x && origin.y == o.origin.y &&
           resolution == o.resolution && width == o.width && height == o.height;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }

  // Raster covering [0, length] x [0, width_m] at `res` meters per cell.
  static GridSpec pitch(double length = kPitchLength, double width_m = kPitchWidth,
                        double res = 0.1) {
    GridSpec g;
    g.origin = {res / 2.0, res / 2.0};
    g.resolution = res;
    g.width = static_cast<int>(std::lround(length / res));
    g.height = static_cast<int>(std::lround(width_m / res));
    return g;
  }
};

}  // namespace pitchtrack
