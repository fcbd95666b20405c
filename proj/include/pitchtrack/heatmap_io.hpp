#pragma once

#include <iosfwd>
#include <string>

#include "pitchtrack/heatmap.hpp"

namespace pitchtrack {

// PTHM container: magic "PTHM", version u16, channel count u16, width u32,
// height u32, resolution f64, origin f64 x2, then per channel
// width*height little-endian f32 in row-major order (y rows of x).

void write_pthm(std::ostream& os, const StackedMap& t);
void write_pthm(const std::string& path, const StackedMap& t);

StackedMap read_pthm(std::istream& is);
StackedMap read_pthm(const std::string& path);

}  // namespace pitchtrack
