#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pitchtrack/heatmap.hpp"
#include "pitchtrack/types.hpp"

namespace pitchtrack {

struct Image {
  int width = 0, height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  std::array<std::uint8_t, 3> pixel(int ix, int iy) const {
    const std::size_t o = 3 * (static_cast<std::size_t>(iy) * width + ix);
    return {rgb[o], rgb[o + 1], rgb[o + 2]};
  }
};

const std::array<std::array<std::uint8_t, 3>, 12>& track_palette();

// Summed detection map as a gray background with colored track trails; the
// head of each trail is drawn last as a filled disk in the track's palette
// color. Image dimensions equal the grid dimensions.
Image render_frame(const Heatmap& summed,
                   const std::vector<std::pair<int, std::vector<WorldPoint>>>& trails);

// Binary portable pixmap (P6).
void write_ppm(const std::string& path, const Image& img);

}  // namespace pitchtrack
