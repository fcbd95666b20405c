#include "pitchtrack/baseline.hpp"

#include <cmath>

namespace pitchtrack {

using nn::Matrix;
using nn::Vector;

namespace {

double gauss(Rng& rng, double sigma) {
  std::normal_distribution<double> d(0.0, sigma);
  return d(rng);
}

}  // namespace

ParticleCloud make_cloud(int track_id, const WorldPoint& at, Rng& rng) {
  ParticleCloud c;
  c.track_id = track_id;
  c.pos.resize(2, kParticleCount);
  c.vel.resize(2, kParticleCount);
  c.w = Vector::Constant(kParticleCount, 1.0 / kParticleCount);
  for (int i = 0; i < kParticleCount; ++i) {
    c.pos(0, i) = at.x + gauss(rng, kPfInitPosSigma);
    c.pos(1, i) = at.y + gauss(rng, kPfInitPosSigma);
    c.vel(0, i) = gauss(rng, kPfInitVelSigma);
    c.vel(1, i) = gauss(rng, kPfInitVelSigma);
  }
  return c;
}

void pf_predict(ParticleCloud& cloud, double dt, Rng& rng) {
  if (dt <= 0.0) throw ConfigInvalid("pf_predict needs dt > 0");
  for (int i = 0; i < cloud.pos.cols(); ++i) {
    cloud.pos(0, i) += cloud.vel(0, i) * dt + gauss(rng, kPfPosNoise);
    cloud.pos(1, i) += cloud.vel(1, i) * dt + gauss(rng, kPfPosNoise);
    cloud.vel(0, i) += gauss(rng, kPfVelNoise);
    cloud.vel(1, i) += gauss(rng, kPfVelNoise);
  }
}

void pf_update(ParticleCloud& cloud, const Heatmap& h) {
  for (int i = 0; i < cloud.w.size(); ++i) {
    const WorldPoint p{cloud.pos(0, i), cloud.pos(1, i)};
    cloud.w(i) = kPfWeightFloor + static_cast<double>(sample_bilinear(h, p));
  }
  cloud.w /= cloud.w.sum();
}

double effective_sample_size(const ParticleCloud& cloud) {
  return 1.0 / cloud.w.squaredNorm();
}

WorldPoint pf_resample_estimate(ParticleCloud& cloud, Rng& rng) {
  const Vector mean = cloud.pos * cloud.w;
  const WorldPoint estimate{mean(0), mean(1)};

  const int n = static_cast<int>(cloud.w.size());
  if (effective_sample_size(cloud) < n / 2.0) {
    std::uniform_real_distribution<double> d(0.0, 1.0 / n);
    const double start = d(rng);
    Matrix pos(2, n), vel(2, n);
    double cum = cloud.w(0);
    int src = 0;
    for (int i = 0; i < n; ++i) {
      const double target = start + static_cast<double>(i) / n;
      while (cum < target && src + 1 < n) cum += cloud.w(++src);
      pos.col(i) = cloud.pos.col(src);
      vel.col(i) = cloud.vel.col(src);
    }
    cloud.pos = std::move(pos);
    cloud.vel = std::move(vel);
    cloud.w.setConstant(1.0 / n);
  }
  return estimate;
}

void pf_tracker_step(BaselineTracker& state, const StackedMap& t_d,
                     const TrackerConfig& cfg, int frame) {
  const Heatmap summed = sum_channels(t_d);

  for (std::size_t i = 0; i < state.tracks.size(); ++i) {
    Track& t = state.tracks[i];
    if (!t.active) continue;
    ParticleCloud& cloud = state.clouds[i];
    pf_predict(cloud, state.dt, state.rng);
    pf_update(cloud, summed);
    t.history.emplace_back(frame, pf_resample_estimate(cloud, state.rng));
  }

  const auto maxima =
      local_maxima(summed, cfg.init_threshold, cfg.init_min_dist);
  const auto spawned =
      advance_lifecycle(state.tracks, state.next_id, maxima, cfg, frame);
  state.clouds.resize(state.tracks.size());
  for (auto idx : spawned)
    state.clouds[idx] =
        make_cloud(state.tracks[idx].id, state.tracks[idx].last_pos(), state.rng);
}

}  // namespace pitchtrack
