#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pitchtrack/errors.hpp"
#include "pitchtrack/types.hpp"

namespace pitchtrack {

// Scalar field over a grid. values(iy, ix) is the activation of cell
// (ix, iy); everything is finite and >= 0.
struct Heatmap {
  GridSpec grid;
  Eigen::ArrayXXf values;  // height rows x width cols

  Heatmap() = default;
  explicit Heatmap(const GridSpec& g)
      : grid(g), values(Eigen::ArrayXXf::Zero(g.height, g.width)) {}

  float at(int ix, int iy) const { return values(iy, ix); }
  float& at(int ix, int iy) { return values(iy, ix); }
};

// Per-camera detection maps warped onto one shared grid, one channel each.
struct StackedMap {
  GridSpec grid;
  std::vector<Eigen::ArrayXXf> channels;

  int channel_count() const { return static_cast<int>(channels.size()); }
};

// Square window cut out of a StackedMap, centered on a cell. `side` is odd
// so the center cell is unambiguous.
struct Crop {
  WorldPoint center;
  int side = 0;
  std::vector<Eigen::ArrayXXf> channels;  // each side x side

  int channel_count() const { return static_cast<int>(channels.size()); }
};

StackedMap stack(const std::vector<Heatmap>& maps);

Crop crop_at(const StackedMap& t, const WorldPoint& center, int side);

// Area-average resampling. Preserves the per-channel mean.
Crop downsample(const Crop& c, int out_side = 32);

Heatmap sum_channels(const StackedMap& t);

// Cells >= threshold that top their 8-neighborhood, greedily thinned so the
// survivors are pairwise at least min_dist meters apart (strongest first).
std::vector<WorldPoint> local_maxima(const Heatmap& h, float threshold,
                                     double min_dist);

// 1-D area-average operator mapping in_cells samples to out_cells; the 2-D
// resample is op * M * op^T.
Eigen::MatrixXd area_average_operator(int in_cells, int out_cells);

// Bilinear read of values at continuous cell coordinates; zero outside.
float sample_bilinear(const Eigen::ArrayXXf& values, double cx, double cy);

// Bilinear read at a plane position.
float sample_bilinear(const Heatmap& h, const WorldPoint& p);

}  // namespace pitchtrack
