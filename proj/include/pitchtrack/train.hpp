#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pitchtrack/simworld.hpp"
#include "pitchtrack/tracker.hpp"

// Teacher-forced training: for every frame k the crops and the graph are
// anchored at the ground-truth positions of frame k-1, the network predicts
// frame k, and the loss is the mean squared Euclidean error. Gradients
// backpropagate through the regressor, the graph rounds, the detection
// encoder and the unrolled LSTM within each window; the LSTM state itself
// carries across windows of one episode.

namespace pitchtrack {

struct TrainConfig {
  int epochs = 30;
  double lr = 1e-3;
  int window = 20;         // frames per truncated-backprop window
  int warmup_frames = 2;   // leading predictions excluded from the loss
  std::uint64_t seed = 7;  // parameter initialization and jitter stream
  // Anchor augmentation: the teacher position that centers the crop, seeds
  // the graph and feeds the LSTM is perturbed while the regression target
  // stays the true position. Online tracking centers crops at the tracker's
  // own imperfect positions; without this the network never learns to pull
  // a drifted track back onto the player. The offset follows a per-player
  // AR(1) walk (stationary sigma center_jitter, correlation jitter_rho), so
  // the perturbed trajectory stays smooth the way real tracking error does.
  double center_jitter = 0.3;
  double jitter_rho = 0.9;
  // With self-anchoring, every frame after the first of a window is anchored
  // at the network's own previous prediction instead of the jittered truth,
  // matching the inference-time input distribution exactly.
  bool self_anchor = false;
};

// Per-player anchor perturbation state, carried across the windows of one
// episode the same way the LSTM states are.
struct JitterState {
  std::vector<Vec2> offsets;
};

// A training episode: ground-truth positions for a fixed player set plus
// the ability to cut crops from the detection maps of any frame.
class EpisodeSource {
 public:
  virtual ~EpisodeSource() = default;
  virtual int frame_count() const = 0;
  virtual int player_count() const = 0;
  virtual std::vector<WorldPoint> positions(int frame) const = 0;
  virtual std::vector<Crop> crops_at(int frame, const std::vector<WorldPoint>& centers,
                                     int side) const = 0;
};

// Holds only ground truth and per-camera detection events; crops are
// re-splatted on demand, so full-pitch rasters are never materialized.
class SimEpisodeSource final : public EpisodeSource {
 public:
  explicit SimEpisodeSource(const sim::ScenarioConfig& cfg);

  int frame_count() const override { return static_cast<int>(gt_.size()); }
  int player_count() const override;
  std::vector<WorldPoint> positions(int frame) const override;
  std::vector<Crop> crops_at(int frame, const std::vector<WorldPoint>& centers,
                             int side) const override;

 private:
  GridSpec grid_;
  std::vector<std::vector<Vec2>> gt_;
  std::vector<sim::FrameDetections> events_;
};

// Full stacked maps in memory; test-sized episodes only.
class MapsEpisodeSource final : public EpisodeSource {
 public:
  MapsEpisodeSource(std::vector<std::vector<WorldPoint>> gt,
                    std::vector<StackedMap> maps);

  int frame_count() const override { return static_cast<int>(gt_.size()); }
  int player_count() const override { return gt_.empty() ? 0 : static_cast<int>(gt_[0].size()); }
  std::vector<WorldPoint> positions(int frame) const override { return gt_[frame]; }
  std::vector<Crop> crops_at(int frame, const std::vector<WorldPoint>& centers,
                             int side) const override;

 private:
  std::vector<std::vector<WorldPoint>> gt_;
  std::vector<StackedMap> maps_;
};

// Generated dataset on disk: gt.csv plus one PTHM file per frame. Frames are
// read lazily with a one-frame cache, so sequential window sweeps touch each
// file once per epoch.
class DiskEpisodeSource final : public EpisodeSource {
 public:
  explicit DiskEpisodeSource(const std::string& episode_dir);

  int frame_count() const override { return static_cast<int>(gt_.size()); }
  int player_count() const override { return gt_.empty() ? 0 : static_cast<int>(gt_[0].size()); }
  std::vector<WorldPoint> positions(int frame) const override { return gt_[frame]; }
  std::vector<Crop> crops_at(int frame, const std::vector<WorldPoint>& centers,
                             int side) const override;

 private:
  const StackedMap& frame_map(int frame) const;

  std::string dir_;
  std::vector<std::vector<WorldPoint>> gt_;
  mutable int cached_frame_ = -1;
  mutable StackedMap cache_;
};

// Loss and gradient of one teacher-forced window [k_begin, k_end). States
// advance in place. Predictions at frames <= warmup_frames carry zero loss
// weight. Anchor perturbation and self-anchoring follow `tcfg`; pass a null
// jitter rng for the exact teacher-forced contract. Returns the mean
// squared error over counted player-frames, or 0 when nothing counted.
// `grad` may be null for loss-only evaluation.
double window_loss(const EpisodeSource& ep, int k_begin, int k_end,
                   std::vector<nn::LstmState>& states, const TrackerParams& params,
                   const TrackerConfig& cfg, int warmup_frames, TrackerParams* grad,
                   const TrainConfig* tcfg = nullptr, Rng* jitter_rng = nullptr,
                   JitterState* jitter = nullptr);

struct TrainStats {
  std::vector<double> window_losses;  // every optimizer step
  std::vector<double> epoch_losses;   // mean per epoch
};

TrainStats train(const std::vector<const EpisodeSource*>& episodes,
                 TrackerParams& params, const TrackerConfig& cfg,
                 const TrainConfig& tcfg);

// Mean Euclidean distance between teacher-forced predictions and ground
// truth, over the frames that would carry loss.
double evaluate_regression_error(const EpisodeSource& ep, const TrackerParams& params,
                                 const TrackerConfig& cfg, int warmup_frames);

}  // namespace pitchtrack
