#include "pitchtrack/trackcsv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pitchtrack/errors.hpp"

namespace pitchtrack {

void write_track_csv(const std::string& path, const std::vector<TrackRow>& rows,
                     const std::string& id_column) {
  std::vector<TrackRow> sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](const TrackRow& a, const TrackRow& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });

  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "frame," << id_column << ",x,y\n";
  char buf[96];
  for (const auto& r : sorted) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.6f\n", r.frame, r.id, r.x, r.y);
    os << buf;
  }
  if (!os) throw IoError("write failed: " + path);
}

std::vector<TrackRow> read_track_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("frame,", 0) != 0)
    throw IoError(path + ": missing `frame,<id>,x,y` header");

  std::vector<TrackRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    TrackRow r;
    char extra;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf%c", &r.frame, &r.id, &r.x, &r.y,
                    &extra) != 4)
      throw IoError(path + ":" + std::to_string(lineno) + ": malformed row");
    rows.push_back(r);
  }
  return rows;
}

FrameSet to_frameset(const std::vector<TrackRow>& rows) {
  FrameSet fs;
  for (const auto& r : rows) fs[r.frame].emplace_back(r.id, WorldPoint{r.x, r.y});
  for (auto& [frame, items] : fs) {
    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < items.size(); ++i)
      if (items[i].first == items[i - 1].first)
        throw IoError("duplicate id " + std::to_string(items[i].first) +
                      " in frame " + std::to_string(frame));
  }
  return fs;
}

FrameSet read_frameset(const std::string& path) {
  return to_frameset(read_track_csv(path));
}

}  // namespace pitchtrack
