#pragma once

#include <map>
#include <string>
#include <vector>

#include "pitchtrack/types.hpp"

namespace pitchtrack {

struct TrackRow {
  int frame = 0;
  int id = 0;
  double x = 0.0;
  double y = 0.0;
};

// CSV schema: header `frame,<id_column>,x,y`, one row per (frame, id),
// positions printed with six decimals, rows sorted by (frame, id).
void write_track_csv(const std::string& path, const std::vector<TrackRow>& rows,
                     const std::string& id_column);

std::vector<TrackRow> read_track_csv(const std::string& path);

// frame -> (id, position), ids sorted within a frame.
using FrameSet = std::map<int, std::vector<std::pair<int, WorldPoint>>>;

FrameSet to_frameset(const std::vector<TrackRow>& rows);
FrameSet read_frameset(const std::string& path);

}  // namespace pitchtrack
