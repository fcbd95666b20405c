#include "pitchtrack/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pitchtrack/errors.hpp"

namespace pitchtrack {

const std::array<std::array<std::uint8_t, 3>, 12>& track_palette() {
  static const std::array<std::array<std::uint8_t, 3>, 12> palette = {{
      {230, 60, 50},   {60, 120, 230}, {50, 190, 90},  {240, 180, 40},
      {170, 80, 220},  {60, 200, 210}, {240, 110, 30}, {190, 210, 60},
      {230, 90, 160},  {110, 90, 240}, {90, 160, 60},  {160, 120, 80},
  }};
  return palette;
}

namespace {

void put_pixel(Image& img, int ix, int iy, const std::array<std::uint8_t, 3>& c) {
  if (ix < 0 || ix >= img.width || iy < 0 || iy >= img.height) return;
  const std::size_t o = 3 * (static_cast<std::size_t>(iy) * img.width + ix);
  img.rgb[o] = c[0];
  img.rgb[o + 1] = c[1];
  img.rgb[o + 2] = c[2];
}

void put_disk(Image& img, int cx, int cy, int radius,
              const std::array<std::uint8_t, 3>& c) {
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) put_pixel(img, cx + dx, cy + dy, c);
}

}  // namespace

Image render_frame(const Heatmap& summed,
                   const std::vector<std::pair<int, std::vector<WorldPoint>>>& trails) {
  Image img;
  img.width = summed.grid.width;
  img.height = summed.grid.height;
  img.rgb.assign(static_cast<std::size_t>(img.width) * img.height * 3, 0);

  const float scale = std::max(1e-6f, summed.values.maxCoeff());
  for (int iy = 0; iy < img.height; ++iy)
    for (int ix = 0; ix < img.width; ++ix) {
      const float v = summed.at(ix, iy) / scale;
      const auto g = static_cast<std::uint8_t>(std::lround(235.0f * std::min(1.0f, v)));
      put_pixel(img, ix, iy, {g, g, g});
    }

  const auto& palette = track_palette();
  for (const auto& [id, points] : trails) {
    const auto& color = palette[static_cast<std::size_t>(id) % palette.size()];
    for (const auto& p : points) {
      const auto [ix, iy] = summed.grid.cell_of(p);
      put_pixel(img, ix, iy, color);
    }
  }
  // Heads last so the current position always carries its track color.
  for (const auto& [id, points] : trails) {
    if (points.empty()) continue;
    const auto& color = palette[static_cast<std::size_t>(id) % palette.size()];
    const auto [ix, iy] = summed.grid.cell_of(points.back());
    put_disk(img, ix, iy, 2, color);
  }
  return img;
}

void write_ppm(const std::string& path, const Image& img) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "P6\n" << img.width << " " << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.rgb.data()),
           static_cast<std::streamsize>(img.rgb.size()));
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace pitchtrack
