#include "pitchtrack/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pitchtrack {

StackedMap stack(const std::vector<Heatmap>& maps) {
  if (maps.empty()) throw GridMismatch("stack of zero maps");
  StackedMap out;
  out.grid = maps[0].grid;
  out.channels.reserve(maps.size());
  for (const auto& m : maps) {
    if (m.grid != out.grid)
      throw GridMismatch("stacked maps must share one grid");
    out.channels.push_back(m.values);
  }
  return out;
}

Crop crop_at(const StackedMap& t, const WorldPoint& center, int side) {
  if (side <= 0 || side % 2 == 0)
    throw ShapeMismatch("crop side must be odd and positive");
  const auto [cx, cy] = t.grid.cell_of(center);
  const int half = side / 2;

  Crop crop;
  crop.center = center;
  crop.side = side;
  crop.channels.reserve(t.channels.size());
  for (const auto& ch : t.channels) {
    Eigen::ArrayXXf w = Eigen::ArrayXXf::Zero(side, side);
    // Intersect the window with the raster; everything else stays zero.
    const int x0 = std::max(0, cx - half), x1 = std::min(t.grid.width - 1, cx + half);
    const int y0 = std::max(0, cy - half), y1 = std::min(t.grid.height - 1, cy + half);
    if (x0 <= x1 && y0 <= y1)
      w.block(y0 - (cy - half), x0 - (cx - half), y1 - y0 + 1, x1 - x0 + 1) =
          ch.block(y0, x0, y1 - y0 + 1, x1 - x0 + 1);
    crop.channels.push_back(std::move(w));
  }
  return crop;
}

Eigen::MatrixXd area_average_operator(int in_cells, int out_cells) {
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(out_cells, in_cells);
  const double r = static_cast<double>(in_cells) / out_cells;
  for (int o = 0; o < out_cells; ++o) {
    const double lo = o * r, hi = (o + 1) * r;
    const int k0 = static_cast<int>(std::floor(lo));
    const int k1 = std::min(in_cells - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int k = k0; k <= k1; ++k) {
      const double overlap =
          std::min(hi, static_cast<double>(k + 1)) - std::max(lo, static_cast<double>(k));
      if (overlap > 0.0) op(o, k) = overlap / r;
    }
  }
  return op;
}

Crop downsample(const Crop& c, int out_side) {
  if (out_side <= 0 || out_side > c.side)
    throw ShapeMismatch("downsample target must satisfy 0 < out_side <= side");
  const Eigen::MatrixXd op = area_average_operator(c.side, out_side);

  Crop out;
  out.center = c.center;
  out.side = out_side;
  out.channels.reserve(c.channels.size());
  for (const auto& ch : c.channels) {
    const Eigen::MatrixXd v = ch.matrix().cast<double>();
    out.channels.push_back((op * v * op.transpose()).array().cast<float>());
  }
  return out;
}

Heatmap sum_channels(const StackedMap& t) {
  Heatmap out;
  out.grid = t.grid;
  out.values = Eigen::ArrayXXf::Zero(t.grid.height, t.grid.width);
  for (const auto& ch : t.channels) out.values += ch;
  return out;
}

std::vector<WorldPoint> local_maxima(const Heatmap& h, float threshold,
                                     double min_dist) {
  if (threshold <= 0.0f || min_dist <= 0.0)
    throw ShapeMismatch("local_maxima needs positive threshold and min_dist");

  struct Peak {
    float value;
    int ix, iy;
  };
  std::vector<Peak> peaks;
  const int w = h.grid.width, ht = h.grid.height;
  for (int iy = 0; iy < ht; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      const float v = h.at(ix, iy);
      if (v < threshold) continue;
      bool top = true;
      for (int dy = -1; dy <= 1 && top; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = ix + dx, ny = iy + dy;
          if (nx < 0 || nx >= w || ny < 0 || ny >= ht) continue;
          if (h.at(nx, ny) > v) {
            top = false;
            break;
          }
        }
      if (top) peaks.push_back({v, ix, iy});
    }
  }

  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.iy != b.iy) return a.iy < b.iy;
    return a.ix < b.ix;
  });

  std::vector<WorldPoint> kept;
  for (const auto& p : peaks) {
    const WorldPoint cand = h.grid.cell_center(p.ix, p.iy);
    bool ok = true;
    for (const auto& k : kept)
      if (distance(cand, k) < min_dist) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(cand);
  }
  return kept;
}

float sample_bilinear(const Eigen::ArrayXXf& values, double cx, double cy) {
  const int w = static_cast<int>(values.cols());
  const int h = static_cast<int>(values.rows());
  const int x0 = static_cast<int>(std::floor(cx));
  const int y0 = static_cast<int>(std::floor(cy));
  const double fx = cx - x0, fy = cy - y0;

  auto at = [&](int ix, int iy) -> double {
    if (ix < 0 || ix >= w || iy < 0 || iy >= h) return 0.0;
    return values(iy, ix);
  };
  const double v = (1 - fx) * (1 - fy) * at(x0, y0) + fx * (1 - fy) * at(x0 + 1, y0) +
                   (1 - fx) * fy * at(x0, y0 + 1) + fx * fy * at(x0 + 1, y0 + 1);
  return static_cast<float>(v);
}

float sample_bilinear(const Heatmap& h, const WorldPoint& p) {
  const Vec2 cc = h.grid.to_cell(p);
  return sample_bilinear(h.values, cc.x(), cc.y());
}

}  // namespace pitchtrack
