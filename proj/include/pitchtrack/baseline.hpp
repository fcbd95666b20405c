#pragma once

#include "pitchtrack/heatmap.hpp"
#include "pitchtrack/nn.hpp"
#include "pitchtrack/tracker.hpp"
#include "pitchtrack/util.hpp"

// Particle-filter comparison tracker. Each target keeps its own cloud with
// constant-velocity dynamics; weights come from the summed bird's-eye
// detection map. Initialization and termination reuse the exact lifecycle
// heuristics of the regression tracker.

namespace pitchtrack {

constexpr int kParticleCount = 200;
constexpr double kPfPosNoise = 0.1;      // m per predict step
constexpr double kPfVelNoise = 0.5;      // m/s per predict step
constexpr double kPfWeightFloor = 1e-6;  // keeps clouds alive off-blob
constexpr double kPfInitPosSigma = 0.3;  // m around the seeding peak
constexpr double kPfInitVelSigma = 1.0;  // m/s

struct ParticleCloud {
  int track_id = 0;
  nn::Matrix pos;  // 2 x N
  nn::Matrix vel;  // 2 x N
  nn::Vector w;    // N, sums to 1
};

ParticleCloud make_cloud(int track_id, const WorldPoint& at, Rng& rng);

void pf_predict(ParticleCloud& cloud, double dt, Rng& rng);

// w_i proportional to floor + map value at the particle; normalized.
void pf_update(ParticleCloud& cloud, const Heatmap& h);

// Weighted-mean estimate, then systematic resampling when the effective
// sample size drops under N/2.
WorldPoint pf_resample_estimate(ParticleCloud& cloud, Rng& rng);

double effective_sample_size(const ParticleCloud& cloud);

struct BaselineTracker {
  double dt = 1.0 / 30.0;
  std::vector<Track> tracks;
  std::vector<ParticleCloud> clouds;  // parallel to tracks
  int next_id = 0;
  Rng rng{12345};
};

void pf_tracker_step(BaselineTracker& state, const StackedMap& t_d,
                     const TrackerConfig& cfg, int frame);

}  // namespace pitchtrack
