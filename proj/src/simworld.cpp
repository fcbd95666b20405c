#include "pitchtrack/simworld.hpp"

#include <algorithm>
#include <cmath>

namespace pitchtrack::sim {

namespace {

double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

double gauss(Rng& rng, double sigma) {
  std::normal_distribution<double> d(0.0, sigma);
  return d(rng);
}

Vec2 unit_or_zero(const Vec2& v) {
  const double n = v.norm();
  return n > 1e-12 ? Vec2(v / n) : Vec2::Zero();
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n_agents <= 0) throw ConfigInvalid("n_agents must be positive");
  if (n_cameras <= 0) throw ConfigInvalid("n_cameras must be positive");
  if (n_frames <= 0) throw ConfigInvalid("n_frames must be positive");
  if (dt <= 0.0) throw ConfigInvalid("dt must be positive");
  if (pitch_length <= 0.0 || pitch_width <= 0.0)
    throw ConfigInvalid("pitch dimensions must be positive");
  if (resolution <= 0.0) throw ConfigInvalid("resolution must be positive");
  if (miss_rate < 0.0 || miss_rate >= 1.0)
    throw ConfigInvalid("miss_rate must lie in [0, 1)");
  if (blob_sigma <= 0.0) throw ConfigInvalid("blob_sigma must be positive");
  if (pos_noise_sigma < 0.0) throw ConfigInvalid("pos_noise_sigma must be >= 0");
  if (calib_bias_max < 0.0) throw ConfigInvalid("calib_bias_max must be >= 0");
  if (max_speed <= 0.0) throw ConfigInvalid("max_speed must be positive");
  if (cluster_attraction < 0.0 || cluster_attraction > 1.0)
    throw ConfigInvalid("cluster_attraction must lie in [0, 1]");
  if (!camera_frame_offsets.empty() &&
      static_cast<int>(camera_frame_offsets.size()) != n_cameras)
    throw ConfigInvalid("camera_frame_offsets must list one value per camera");
  if (!camera_homographies.empty() &&
      static_cast<int>(camera_homographies.size()) != n_cameras)
    throw ConfigInvalid("camera_homographies must list one matrix per camera");
}

std::vector<Homography> default_camera_homographies(double length, double width) {
  // Corner-mounted cameras on a nominal 1920x1080 sensor. Each maps the
  // pitch quad to a perspective trapezoid: wide near its own corner,
  // squeezed toward the far side.
  const Vec2 c00(0.0, 0.0), c10(length, 0.0), c01(0.0, width), c11(length, width);
  const std::vector<Vec2> ground = {c00, c10, c01, c11};

  auto fit = [&](std::initializer_list<Vec2> image) {
    std::vector<Vec2> img(image);
    return estimate_homography(ground, img);
  };

  std::vector<Homography> hs;
  // Near corner maps low and wide (large v = close to the camera).
  hs.push_back(fit({{260.0, 1010.0}, {1730.0, 690.0}, {210.0, 330.0}, {1620.0, 210.0}}));
  hs.push_back(fit({{190.0, 690.0}, {1660.0, 1010.0}, {300.0, 210.0}, {1710.0, 330.0}}));
  hs.push_back(fit({{250.0, 320.0}, {1640.0, 200.0}, {270.0, 1000.0}, {1700.0, 680.0}}));
  hs.push_back(fit({{280.0, 200.0}, {1680.0, 320.0}, {220.0, 680.0}, {1730.0, 1000.0}}));
  return hs;
}

std::vector<CameraModel> build_cameras(const ScenarioConfig& cfg, Rng& rng) {
  std::vector<Homography> h_true;
  if (!cfg.camera_homographies.empty()) {
    h_true = cfg.camera_homographies;
  } else {
    const auto defaults =
        default_camera_homographies(cfg.pitch_length, cfg.pitch_width);
    for (int c = 0; c < cfg.n_cameras; ++c)
      h_true.push_back(defaults[c % defaults.size()]);
  }

  std::vector<CameraModel> cams;
  cams.reserve(cfg.n_cameras);
  for (int c = 0; c < cfg.n_cameras; ++c) {
    CameraModel cam;
    cam.h_true = h_true[c];
    // Calibration drift: the believed mapping is the true one composed with
    // a small ground-plane shift, so back-projection lands off by -delta.
    const double mag = uniform(rng, 0.0, cfg.calib_bias_max);
    const double ang = uniform(rng, 0.0, 2.0 * M_PI);
    cam.h_calib = cam.h_true.compose(
        Homography::translation(mag * std::cos(ang), mag * std::sin(ang)));
    cam.miss_rate = cfg.miss_rate;
    cam.blob_sigma = cfg.blob_sigma;
    cam.pos_noise_sigma = cfg.pos_noise_sigma;
    cam.occlusion_dist = cfg.occlusion_dist;
    cam.frame_offset =
        cfg.camera_frame_offsets.empty() ? 0 : cfg.camera_frame_offsets[c];
    cams.push_back(cam);
  }
  return cams;
}

void step_world(std::vector<Agent>& agents, Ball& ball, const ScenarioConfig& cfg,
                Rng& rng) {
  if (cfg.dt <= 0.0) throw ConfigInvalid("dt must be positive");
  const double lo_x = -kPitchMargin, hi_x = cfg.pitch_length + kPitchMargin;
  const double lo_y = -kPitchMargin, hi_y = cfg.pitch_width + kPitchMargin;

  std::vector<Vec2> accel(agents.size(), Vec2::Zero());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    Agent& a = agents[i];
    if ((a.waypoint - a.pos).norm() < kArriveRadius) {
      a.waypoint = {uniform(rng, 0.0, cfg.pitch_length),
                    uniform(rng, 0.0, cfg.pitch_width)};
    }
    const Vec2 blend = (1.0 - cfg.cluster_attraction) * unit_or_zero(a.waypoint - a.pos) +
                       cfg.cluster_attraction * unit_or_zero(ball.pos - a.pos);
    const Vec2 desired = a.max_speed * unit_or_zero(blend);
    accel[i] = kSteerGain * (desired - a.vel);
  }

  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      const Vec2 d = agents[i].pos - agents[j].pos;
      const double dist = d.norm();
      if (dist >= kRepulseRadius) continue;
      Vec2 dir;
      if (dist > 1e-9) {
        dir = d / dist;
      } else {
        const double ang = uniform(rng, 0.0, 2.0 * M_PI);
        dir = {std::cos(ang), std::sin(ang)};
      }
      const double f = kRepulseGain * (kRepulseRadius - dist) / kRepulseRadius;
      accel[i] += f * dir;
      accel[j] -= f * dir;
    }
  }

  for (std::size_t i = 0; i < agents.size(); ++i) {
    Agent& a = agents[i];
    a.vel += accel[i] * cfg.dt;
    const double speed = a.vel.norm();
    if (speed > a.max_speed) a.vel *= a.max_speed / speed;
    a.pos += a.vel * cfg.dt;
    if (a.pos.x() < lo_x) { a.pos.x() = lo_x; a.vel.x() = std::max(0.0, a.vel.x()); }
    if (a.pos.x() > hi_x) { a.pos.x() = hi_x; a.vel.x() = std::min(0.0, a.vel.x()); }
    if (a.pos.y() < lo_y) { a.pos.y() = lo_y; a.vel.y() = std::max(0.0, a.vel.y()); }
    if (a.pos.y() > hi_y) { a.pos.y() = hi_y; a.vel.y() = std::min(0.0, a.vel.y()); }
  }

  ball.vel = kBallDrag * ball.vel + Vec2(gauss(rng, kBallKick), gauss(rng, kBallKick));
  ball.pos += ball.vel * cfg.dt;
  if (ball.pos.x() < 0.0) { ball.pos.x() = -ball.pos.x(); ball.vel.x() = -ball.vel.x(); }
  if (ball.pos.x() > cfg.pitch_length) {
    ball.pos.x() = 2.0 * cfg.pitch_length - ball.pos.x();
    ball.vel.x() = -ball.vel.x();
  }
  if (ball.pos.y() < 0.0) { ball.pos.y() = -ball.pos.y(); ball.vel.y() = -ball.vel.y(); }
  if (ball.pos.y() > cfg.pitch_width) {
    ball.pos.y() = 2.0 * cfg.pitch_width - ball.pos.y();
    ball.vel.y() = -ball.vel.y();
  }
}

CameraDetections detect_agents(const std::vector<Vec2>& positions,
                               const CameraModel& cam, Rng& rng) {
  const std::size_t n = positions.size();
  std::vector<Vec2> pixels(n);
  for (std::size_t i = 0; i < n; ++i)
    pixels[i] = project(cam.h_true, positions[i]);

  const Homography back = cam.h_calib.inverse();
  CameraDetections dets(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (uniform(rng, 0.0, 1.0) < cam.miss_rate) continue;  // detector miss

    // Occluded when a nearer agent (larger image v; lower index on a tie)
    // projects within occlusion_dist pixels.
    bool occluded = false;
    for (std::size_t j = 0; j < n && !occluded; ++j) {
      if (j == i) continue;
      if ((pixels[j] - pixels[i]).norm() >= cam.occlusion_dist) continue;
      if (pixels[j].y() > pixels[i].y() ||
          (pixels[j].y() == pixels[i].y() && j < i))
        occluded = true;
    }
    if (occluded) continue;

    const Vec2 noisy = positions[i] + Vec2(gauss(rng, cam.pos_noise_sigma),
                                           gauss(rng, cam.pos_noise_sigma));
    Detection d;
    d.world = project(back, project(cam.h_true, noisy));
    d.peak = uniform(rng, 0.7, 1.0);
    d.sigma = cam.blob_sigma;
    d.visible = true;
    dets[i] = d;
  }
  return dets;
}

void splat_detections(const CameraDetections& dets, const GridSpec& grid,
                      int window_x0, int window_y0, Eigen::ArrayXXf& window) {
  const int wh = static_cast<int>(window.rows());
  const int ww = static_cast<int>(window.cols());
  for (const auto& d : dets) {
    if (!d.visible) continue;
    const double inv2s2 = 1.0 / (2.0 * d.sigma * d.sigma);
    const int reach = static_cast<int>(std::ceil(3.0 * d.sigma / grid.resolution));
    const Vec2 cc = grid.to_cell(WorldPoint::from(d.world));
    const int cx = static_cast<int>(std::floor(cc.x() + 0.5));
    const int cy = static_cast<int>(std::floor(cc.y() + 0.5));
    // Iterate raster cells so the written values never depend on the window
    // placement; a crop window sees exactly the full-raster floats.
    for (int iy = cy - reach; iy <= cy + reach; ++iy) {
      const int wy = iy - window_y0;
      if (wy < 0 || wy >= wh || iy < 0 || iy >= grid.height) continue;
      for (int ix = cx - reach; ix <= cx + reach; ++ix) {
        const int wx = ix - window_x0;
        if (wx < 0 || wx >= ww || ix < 0 || ix >= grid.width) continue;
        const WorldPoint center = grid.cell_center(ix, iy);
        const double d2 = (center.vec() - d.world).squaredNorm();
        window(wy, wx) += static_cast<float>(d.peak * std::exp(-d2 * inv2s2));
      }
    }
  }
}

Heatmap heatmap_from_detections(const CameraDetections& dets, const GridSpec& grid) {
  Heatmap out(grid);
  splat_detections(dets, grid, 0, 0, out.values);
  out.values = out.values.min(kHeatmapClamp);
  return out;
}

Heatmap render_detections(const std::vector<Vec2>& positions, const CameraModel& cam,
                          const GridSpec& grid, Rng& rng) {
  return heatmap_from_detections(detect_agents(positions, cam, rng), grid);
}

Crop crop_from_detections(const FrameDetections& dets, const GridSpec& grid,
                          const WorldPoint& center, int side) {
  if (side <= 0 || side % 2 == 0)
    throw ShapeMismatch("crop side must be odd and positive");
  const auto [cx, cy] = grid.cell_of(center);
  const int half = side / 2;

  Crop crop;
  crop.center = center;
  crop.side = side;
  crop.channels.reserve(dets.size());
  for (const auto& cam_dets : dets) {
    Eigen::ArrayXXf w = Eigen::ArrayXXf::Zero(side, side);
    splat_detections(cam_dets, grid, cx - half, cy - half, w);
    w = w.min(kHeatmapClamp);
    crop.channels.push_back(std::move(w));
  }
  return crop;
}

EpisodeStream::EpisodeStream(const ScenarioConfig& cfg)
    : cfg_(cfg), grid_(cfg.grid()), rng_(cfg.seed) {
  cfg_.validate();
  cameras_ = build_cameras(cfg_, rng_);
  for (const auto& cam : cameras_)
    max_offset_ = std::max(max_offset_, cam.frame_offset);

  agents_.resize(cfg_.n_agents);
  for (int i = 0; i < cfg_.n_agents; ++i) {
    Agent& a = agents_[i];
    a.id = i;
    a.pos = {uniform(rng_, 0.0, cfg_.pitch_length),
             uniform(rng_, 0.0, cfg_.pitch_width)};
    a.vel = Vec2::Zero();
    a.max_speed = cfg_.max_speed;
    a.waypoint = {uniform(rng_, 0.0, cfg_.pitch_length),
                  uniform(rng_, 0.0, cfg_.pitch_width)};
  }
  ball_.pos = {cfg_.pitch_length / 2.0, cfg_.pitch_width / 2.0};
  ball_.vel = Vec2::Zero();
}

bool EpisodeStream::next(std::vector<Vec2>& positions, FrameDetections& dets) {
  if (frame_ >= cfg_.n_frames) return false;
  if (frame_ > 0) step_world(agents_, ball_, cfg_, rng_);

  positions.resize(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) positions[i] = agents_[i].pos;

  history_.push_back(positions);
  while (static_cast<int>(history_.size()) > max_offset_ + 1) history_.pop_front();

  dets.clear();
  dets.reserve(cameras_.size());
  for (const auto& cam : cameras_) {
    // A delayed camera observes the world as it was frame_offset frames ago.
    const int back = std::min<int>(cam.frame_offset,
                                   static_cast<int>(history_.size()) - 1);
    const auto& seen = history_[history_.size() - 1 - back];
    dets.push_back(detect_agents(seen, cam, rng_));
  }
  ++frame_;
  return true;
}

StackedMap EpisodeStream::render_stack(const FrameDetections& dets) const {
  StackedMap t;
  t.grid = grid_;
  t.channels.reserve(dets.size());
  for (const auto& cam_dets : dets)
    t.channels.push_back(heatmap_from_detections(cam_dets, grid_).values);
  return t;
}

std::pair<Episode, std::vector<StackedMap>> generate_episode(const ScenarioConfig& cfg) {
  EpisodeStream stream(cfg);
  Episode ep;
  ep.dt = cfg.dt;
  ep.cameras = stream.cameras();

  std::vector<StackedMap> maps;
  std::vector<Vec2> positions;
  FrameDetections dets;
  while (stream.next(positions, dets)) {
    std::vector<std::pair<int, WorldPoint>> frame;
    frame.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
      frame.emplace_back(static_cast<int>(i), WorldPoint::from(positions[i]));
    ep.frames.push_back(std::move(frame));
    maps.push_back(stream.render_stack(dets));
  }
  return {std::move(ep), std::move(maps)};
}

}  // namespace pitchtrack::sim
