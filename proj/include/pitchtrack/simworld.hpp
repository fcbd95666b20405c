#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "pitchtrack/geometry.hpp"
#include "pitchtrack/heatmap.hpp"
#include "pitchtrack/types.hpp"
#include "pitchtrack/util.hpp"

// Synthetic multi-camera world: waypoint-seeking agents that crowd around a
// wandering ball, virtual corner cameras with imperfect calibration, and
// per-camera detection heatmaps rendered straight onto the ground raster.

namespace pitchtrack::sim {

struct Agent {
  int id = 0;
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();
  double max_speed = 8.0;
  Vec2 waypoint = Vec2::Zero();
};

struct Ball {
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();
};

// Motion-law constants, exposed so the stepping contract is testable.
constexpr double kSteerGain = 2.0;        // 1/s, pull toward desired velocity
constexpr double kArriveRadius = 0.5;     // m, waypoint considered reached
constexpr double kRepulseRadius = 0.5;    // m, personal space
constexpr double kRepulseGain = 30.0;     // m/s^2 at zero separation
constexpr double kBallDrag = 0.97;
constexpr double kBallKick = 0.8;         // m/s random drive per step

struct CameraModel {
  Homography h_true;   // ground -> image, the physical mapping
  Homography h_calib;  // ground -> image as the tracker believes it
  double miss_rate = 0.05;
  double blob_sigma = 0.3;        // m
  double pos_noise_sigma = 0.15;  // m
  double occlusion_dist = 25.0;   // px
  int frame_offset = 0;           // frames of feed delay
};

struct ScenarioConfig {
  int n_agents = 10;
  int n_cameras = 4;
  int n_frames = 600;
  double dt = 1.0 / 30.0;
  double pitch_length = kPitchLength;
  double pitch_width = kPitchWidth;
  double resolution = 0.1;
  std::uint64_t seed = 1;
  double cluster_attraction = 0.35;
  double miss_rate = 0.05;
  double blob_sigma = 0.3;
  double pos_noise_sigma = 0.15;
  double occlusion_dist = 25.0;
  double calib_bias_max = 0.5;  // m of per-camera ground-plane drift
  double max_speed = 8.0;
  std::vector<int> camera_frame_offsets;          // empty = all zero
  std::vector<Homography> camera_homographies;    // empty = corner cameras

  GridSpec grid() const {
    return GridSpec::pitch(pitch_length, pitch_width, resolution);
  }
  void validate() const;  // throws ConfigInvalid
};

struct Episode {
  std::vector<std::vector<std::pair<int, WorldPoint>>> frames;  // per frame (id, pos)
  double dt = 1.0 / 30.0;
  std::vector<CameraModel> cameras;
};

// One agent as seen by one camera after dropout, occlusion, noise and the
// calibration round trip; `world` is where the blob lands on the raster.
struct Detection {
  bool visible = false;
  Vec2 world = Vec2::Zero();
  double peak = 0.0;
  double sigma = 0.3;  // blob spread in meters
};

using CameraDetections = std::vector<Detection>;            // per agent
using FrameDetections = std::vector<CameraDetections>;      // per camera

// The four default cameras for a pitch of the given size, h_true only.
std::vector<Homography> default_camera_homographies(double length, double width);

std::vector<CameraModel> build_cameras(const ScenarioConfig& cfg, Rng& rng);

// Advances agents and ball by one step of dt. Consumes rng only for waypoint
// resampling, coincident-agent separation and the ball drive.
void step_world(std::vector<Agent>& agents, Ball& ball, const ScenarioConfig& cfg,
                Rng& rng);

// Dropout, occlusion and measurement for every agent in one camera. Draws,
// per agent in index order: miss uniform, then (if visible) two position
// normals and the peak uniform.
CameraDetections detect_agents(const std::vector<Vec2>& positions,
                               const CameraModel& cam, Rng& rng);

// Splats detections into the window whose cell (0,0) is raster cell
// (window_x0, window_y0); `grid` supplies world geometry. Blobs add; the
// caller clamps.
void splat_detections(const CameraDetections& dets, const GridSpec& grid,
                      int window_x0, int window_y0, Eigen::ArrayXXf& window);

constexpr float kHeatmapClamp = 1.5f;

// Full per-camera render: detect + splat + clamp.
Heatmap render_detections(const std::vector<Vec2>& positions, const CameraModel& cam,
                          const GridSpec& grid, Rng& rng);

// Renders a crop of the stacked detection maps directly from detections;
// bit-identical to crop_at(stack(render...), center, side).
Crop crop_from_detections(const FrameDetections& dets, const GridSpec& grid,
                          const WorldPoint& center, int side);

Heatmap heatmap_from_detections(const CameraDetections& dets, const GridSpec& grid);

// Streams one episode frame at a time so full-pitch rasters never pile up.
class EpisodeStream {
 public:
  explicit EpisodeStream(const ScenarioConfig& cfg);

  const std::vector<CameraModel>& cameras() const { return cameras_; }
  const GridSpec& grid() const { return grid_; }
  int frames_total() const { return cfg_.n_frames; }
  int frame_index() const { return frame_; }

  // False once the episode is exhausted. Positions are the true agent
  // states at this frame; dets[c] reflects camera c's (possibly delayed)
  // view of the world.
  bool next(std::vector<Vec2>& positions, FrameDetections& dets);

  StackedMap render_stack(const FrameDetections& dets) const;

 private:
  ScenarioConfig cfg_;
  GridSpec grid_;
  std::vector<CameraModel> cameras_;
  std::vector<Agent> agents_;
  Ball ball_;
  Rng rng_;
  int frame_ = 0;
  int max_offset_ = 0;
  std::deque<std::vector<Vec2>> history_;  // recent true positions for delays
};

// Whole episode in memory; only suitable for short runs.
std::pair<Episode, std::vector<StackedMap>> generate_episode(const ScenarioConfig& cfg);

}  // namespace pitchtrack::sim
