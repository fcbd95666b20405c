#include "pitchtrack/heatmap.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "pitchtrack/heatmap_io.hpp"

using namespace pitchtrack;

namespace {

GridSpec small_grid(int w = 80, int h = 60) {
  GridSpec g;
  g.origin = {0.05, 0.05};
  g.resolution = 0.1;
  g.width = w;
  g.height = h;
  return g;
}

Heatmap random_map(const GridSpec& grid, std::uint64_t seed, float hi = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> val(0.0f, hi);
  Heatmap m(grid);
  for (int iy = 0; iy < grid.height; ++iy)
    for (int ix = 0; ix < grid.width; ++ix) m.at(ix, iy) = val(rng);
  return m;
}

void add_blob(Heatmap& h, const WorldPoint& at, double sigma, float peak) {
  for (int iy = 0; iy < h.grid.height; ++iy)
    for (int ix = 0; ix < h.grid.width; ++ix) {
      const WorldPoint c = h.grid.cell_center(ix, iy);
      const double d2 = (c.vec() - at.vec()).squaredNorm();
      h.at(ix, iy) += static_cast<float>(peak * std::exp(-d2 / (2 * sigma * sigma)));
    }
}

}  // namespace

TEST(Stack, SingleMapIsIdentity) {
  const Heatmap m = random_map(small_grid(), 1);
  const StackedMap t = stack({m});
  ASSERT_EQ(t.channel_count(), 1);
  EXPECT_TRUE((t.channels[0] == m.values).all());
}

TEST(Stack, PreservesChannelOrder) {
  std::vector<Heatmap> maps;
  for (int k = 0; k < 4; ++k) maps.push_back(random_map(small_grid(), 10 + k));
  const StackedMap t = stack(maps);
  ASSERT_EQ(t.channel_count(), 4);
  for (int k = 0; k < 4; ++k)
    EXPECT_TRUE((t.channels[k] == maps[k].values).all()) << "channel " << k;
}

TEST(Stack, SumAgreesWithDirectSummation) {
  std::vector<Heatmap> maps;
  for (int k = 0; k < 4; ++k) maps.push_back(random_map(small_grid(), 20 + k));
  const Heatmap summed = sum_channels(stack(maps));

  // Loop reference with identical accumulation order: channel by channel.
  const GridSpec g = small_grid();
  for (int iy = 0; iy < g.height; ++iy)
    for (int ix = 0; ix < g.width; ++ix) {
      float acc = maps[0].at(ix, iy);
      for (int k = 1; k < 4; ++k) acc += maps[k].at(ix, iy);
      ASSERT_EQ(summed.at(ix, iy), acc);
    }
}

TEST(Stack, GridMismatchThrows) {
  const Heatmap a = random_map(small_grid(80, 60), 1);
  const Heatmap b = random_map(small_grid(81, 60), 2);
  EXPECT_THROW(stack({a, b}), GridMismatch);
}

TEST(CropAt, UniformMapGivesUniformCrop) {
  const GridSpec g = small_grid(200, 200);
  Heatmap m(g);
  m.values.setConstant(0.7f);
  const Crop c = crop_at(stack({m}), g.cell_center(100, 100), 41);
  EXPECT_TRUE((c.channels[0] == 0.7f).all());
}

TEST(CropAt, CornerIsMostlyZeroPadding) {
  const GridSpec g = small_grid(200, 200);
  Heatmap m(g);
  m.values.setConstant(1.0f);
  const Crop c = crop_at(stack({m}), g.cell_center(0, 0), 81);
  const int zeros = (c.channels[0] == 0.0f).count();
  // Window centered on the corner: only ~one quarter overlaps the raster.
  EXPECT_GT(zeros, static_cast<int>(0.7 * 81 * 81));
  EXPECT_EQ((c.channels[0] != 0.0f).count(), 41 * 41);
}

TEST(CropAt, DeltaImpulseLandsAtExpectedOffset) {
  const GridSpec g = GridSpec::pitch();  // 0.1 m cells
  Heatmap m(g);
  const WorldPoint center{50.05, 30.05};
  const WorldPoint impulse{center.x + 2.0, center.y};  // 2 m east
  const auto [ix, iy] = g.cell_of(impulse);
  m.at(ix, iy) = 1.0f;

  const Crop c = crop_at(stack({m}), center, 81);
  // +20 cells east of the crop center at 0.1 m per cell.
  EXPECT_EQ(c.channels[0](40, 40 + 20), 1.0f);
  EXPECT_EQ((c.channels[0] != 0.0f).count(), 1);
}

TEST(CropAt, CenterCellMatchesRaster) {
  const GridSpec g = small_grid(120, 90);
  const Heatmap m = random_map(g, 33);
  const StackedMap t = stack({m});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> px(0.0, g.width * g.resolution);
  std::uniform_real_distribution<double> py(0.0, g.height * g.resolution);
  for (int trial = 0; trial < 200; ++trial) {
    const WorldPoint p{px(rng), py(rng)};
    const auto [cx, cy] = g.cell_of(p);
    if (!g.contains_cell(cx, cy)) continue;
    const Crop c = crop_at(t, p, 21);
    ASSERT_EQ(c.channels[0](10, 10), m.at(cx, cy));
  }
}

TEST(CropAt, EvenSideThrows) {
  const Heatmap m = random_map(small_grid(), 2);
  EXPECT_THROW(crop_at(stack({m}), {1.0, 1.0}, 40), ShapeMismatch);
}

TEST(Downsample, ConstantStaysConstant) {
  Crop c;
  c.side = 81;
  c.channels = {Eigen::ArrayXXf::Constant(81, 81, 0.42f)};
  const Crop d = downsample(c, 32);
  ASSERT_EQ(d.side, 32);
  EXPECT_LT((d.channels[0] - 0.42f).abs().maxCoeff(), 1e-6f);
}

TEST(Downsample, ZeroStaysZero) {
  Crop c;
  c.side = 81;
  c.channels = {Eigen::ArrayXXf::Zero(81, 81)};
  const Crop d = downsample(c, 32);
  EXPECT_EQ(d.channels[0].abs().maxCoeff(), 0.0f);
}

TEST(Downsample, PreservesMean) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<float> val(0.0f, 1.5f);
  Crop c;
  c.side = 81;
  c.channels = {Eigen::ArrayXXf(81, 81)};
  for (int iy = 0; iy < 81; ++iy)
    for (int ix = 0; ix < 81; ++ix) c.channels[0](iy, ix) = val(rng);
  const Crop d = downsample(c, 32);

  const double mean_in = c.channels[0].cast<double>().mean();
  const double mean_out = d.channels[0].cast<double>().mean();
  EXPECT_LT(std::abs(mean_out - mean_in) / mean_in, 1e-6);
  EXPECT_GE(d.channels[0].minCoeff(), 0.0f);
}

TEST(Downsample, TooLargeTargetThrows) {
  Crop c;
  c.side = 31;
  c.channels = {Eigen::ArrayXXf::Zero(31, 31)};
  EXPECT_THROW(downsample(c, 32), ShapeMismatch);
}

TEST(SumChannels, SingleChannelIdentity) {
  const Heatmap m = random_map(small_grid(), 3);
  const Heatmap s = sum_channels(stack({m}));
  EXPECT_TRUE((s.values == m.values).all());
}

TEST(SumChannels, TwoEqualChannelsDouble) {
  const Heatmap m = random_map(small_grid(), 4);
  const Heatmap s = sum_channels(stack({m, m}));
  EXPECT_TRUE((s.values == m.values + m.values).all());
}

TEST(LocalMaxima, EmptyMapGivesNothing) {
  const Heatmap m(small_grid());
  EXPECT_TRUE(local_maxima(m, 0.3f, 1.0).empty());
}

TEST(LocalMaxima, SingleBlobSinglePeak) {
  const GridSpec g = small_grid(120, 90);
  Heatmap m(g);
  const WorldPoint at{4.0, 3.0};
  add_blob(m, at, 0.3, 1.0f);
  const auto peaks = local_maxima(m, 0.5f, 1.0);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_LT(distance(peaks[0], at), 0.11);  // within one cell
}

TEST(LocalMaxima, CloseBlobsSuppressedByMinDist) {
  const GridSpec g = small_grid(120, 90);
  Heatmap m(g);
  add_blob(m, {4.0, 3.0}, 0.2, 1.0f);
  add_blob(m, {4.5, 3.0}, 0.2, 0.8f);  // 0.5 m away, weaker
  const auto peaks = local_maxima(m, 0.3f, 1.0);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_LT(distance(peaks[0], {4.0, 3.0}), 0.15);
}

TEST(LocalMaxima, CountMonotoneInThreshold) {
  const GridSpec g = small_grid(150, 100);
  Heatmap m(g);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> px(1.0, 14.0), py(1.0, 9.0);
  std::uniform_real_distribution<float> peak(0.3f, 1.2f);
  for (int b = 0; b < 12; ++b) add_blob(m, {px(rng), py(rng)}, 0.25, peak(rng));

  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (float thr : {0.1f, 0.3f, 0.5f, 0.7f, 0.9f, 1.1f}) {
    const std::size_t count = local_maxima(m, thr, 0.5).size();
    EXPECT_LE(count, prev);
    prev = count;
  }
}

TEST(Linearity, SumAndDownsampleScale) {
  const GridSpec g = small_grid();
  std::vector<Heatmap> maps = {random_map(g, 41), random_map(g, 42)};
  const float a = 2.5f;
  std::vector<Heatmap> scaled = maps;
  for (auto& m : scaled) m.values *= a;

  const Heatmap s1 = sum_channels(stack(maps));
  const Heatmap s2 = sum_channels(stack(scaled));
  EXPECT_LT((s2.values - a * s1.values).abs().maxCoeff(), 1e-5f);

  Crop c;
  c.side = 81;
  c.channels = {Eigen::ArrayXXf(81, 81)};
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<float> val(0.0f, 1.0f);
  for (int iy = 0; iy < 81; ++iy)
    for (int ix = 0; ix < 81; ++ix) c.channels[0](iy, ix) = val(rng);
  Crop ca = c;
  ca.channels[0] *= a;
  const Crop d1 = downsample(c, 32);
  const Crop d2 = downsample(ca, 32);
  EXPECT_LT((d2.channels[0] - a * d1.channels[0]).abs().maxCoeff(), 1e-5f);
}

TEST(PthmIo, RoundTripsBitExact) {
  const GridSpec g = small_grid(37, 23);
  std::vector<Heatmap> maps;
  for (int k = 0; k < 3; ++k) maps.push_back(random_map(g, 50 + k));
  const StackedMap t = stack(maps);

  std::ostringstream first;
  write_pthm(first, t);
  std::istringstream in(first.str());
  const StackedMap back = read_pthm(in);

  ASSERT_TRUE(back.grid == t.grid);
  ASSERT_EQ(back.channel_count(), t.channel_count());
  for (int k = 0; k < t.channel_count(); ++k)
    EXPECT_TRUE((back.channels[k] == t.channels[k]).all());

  std::ostringstream second;
  write_pthm(second, back);
  EXPECT_EQ(first.str(), second.str());
}

TEST(PthmIo, RejectsForeignMagic) {
  std::istringstream in("NOPE....");
  EXPECT_THROW(read_pthm(in), IoError);
}
