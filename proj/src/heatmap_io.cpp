#include "pitchtrack/heatmap_io.hpp"

#include <fstream>

#include "pitchtrack/binio.hpp"

namespace pitchtrack {

namespace {
constexpr char kMagic[4] = {'P', 'T', 'H', 'M'};
constexpr std::uint16_t kVersion = 1;
}  // namespace

void write_pthm(std::ostream& os, const StackedMap& t) {
  binio::write_magic(os, kMagic);
  binio::write_le<std::uint16_t>(os, kVersion);
  binio::write_le<std::uint16_t>(os, static_cast<std::uint16_t>(t.channels.size()));
  binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.grid.width));
  binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.grid.height));
  binio::write_le<double>(os, t.grid.resolution);
  binio::write_le<double>(os, t.grid.origin.x);
  binio::write_le<double>(os, t.grid.origin.y);
  for (const auto& ch : t.channels)
    for (int iy = 0; iy < t.grid.height; ++iy)
      for (int ix = 0; ix < t.grid.width; ++ix)
        binio::write_le<float>(os, ch(iy, ix));
  if (!os) throw IoError("PTHM write failed");
}

void write_pthm(const std::string& path, const StackedMap& t) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_pthm(os, t);
}

StackedMap read_pthm(std::istream& is) {
  binio::expect_magic(is, kMagic, "PTHM");
  const auto version = binio::read_le<std::uint16_t>(is);
  if (version != kVersion) throw IoError("unsupported PTHM version");
  const auto channels = binio::read_le<std::uint16_t>(is);
  const auto width = binio::read_le<std::uint32_t>(is);
  const auto height = binio::read_le<std::uint32_t>(is);

  StackedMap t;
  t.grid.width = static_cast<int>(width);
  t.grid.height = static_cast<int>(height);
  t.grid.resolution = binio::read_le<double>(is);
  t.grid.origin.x = binio::read_le<double>(is);
  t.grid.origin.y = binio::read_le<double>(is);
  t.channels.resize(channels);
  for (auto& ch : t.channels) {
    ch.resize(height, width);
    for (std::uint32_t iy = 0; iy < height; ++iy)
      for (std::uint32_t ix = 0; ix < width; ++ix)
        ch(iy, ix) = binio::read_le<float>(is);
  }
  return t;
}

StackedMap read_pthm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return read_pthm(is);
}

}  // namespace pitchtrack
