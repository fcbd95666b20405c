#include "pitchtrack/train.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include "pitchtrack/heatmap_io.hpp"
#include "pitchtrack/trackcsv.hpp"

namespace pitchtrack {

using nn::Matrix;
using nn::Vector;

// ---------------------------------------------------------------------------
// Episode sources

SimEpisodeSource::SimEpisodeSource(const sim::ScenarioConfig& cfg)
    : grid_(cfg.grid()) {
  sim::EpisodeStream stream(cfg);
  std::vector<Vec2> positions;
  sim::FrameDetections dets;
  while (stream.next(positions, dets)) {
    gt_.push_back(positions);
    events_.push_back(dets);
  }
}

int SimEpisodeSource::player_count() const {
  return gt_.empty() ? 0 : static_cast<int>(gt_[0].size());
}

std::vector<WorldPoint> SimEpisodeSource::positions(int frame) const {
  std::vector<WorldPoint> out;
  out.reserve(gt_[frame].size());
  for (const auto& p : gt_[frame]) out.push_back(WorldPoint::from(p));
  return out;
}

std::vector<Crop> SimEpisodeSource::crops_at(int frame,
                                             const std::vector<WorldPoint>& centers,
                                             int side) const {
  std::vector<Crop> crops(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i)
    crops[i] = sim::crop_from_detections(events_[frame], grid_, centers[i], side);
  return crops;
}

MapsEpisodeSource::MapsEpisodeSource(std::vector<std::vector<WorldPoint>> gt,
                                     std::vector<StackedMap> maps)
    : gt_(std::move(gt)), maps_(std::move(maps)) {
  if (gt_.size() != maps_.size())
    throw ShapeMismatch("one stacked map per ground-truth frame required");
}

std::vector<Crop> MapsEpisodeSource::crops_at(int frame,
                                              const std::vector<WorldPoint>& centers,
                                              int side) const {
  std::vector<Crop> crops(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i)
    crops[i] = crop_at(maps_[frame], centers[i], side);
  return crops;
}

DiskEpisodeSource::DiskEpisodeSource(const std::string& episode_dir) : dir_(episode_dir) {
  const auto rows = read_track_csv(dir_ + "/gt.csv");
  if (rows.empty()) throw EmptyDataset("no ground truth rows in " + dir_);
  int max_frame = 0;
  for (const auto& r : rows) max_frame = std::max(max_frame, r.frame);
  std::vector<std::vector<std::pair<int, WorldPoint>>> by_frame(max_frame + 1);
  for (const auto& r : rows)
    by_frame[r.frame].emplace_back(r.id, WorldPoint{r.x, r.y});

  gt_.resize(by_frame.size());
  for (std::size_t f = 0; f < by_frame.size(); ++f) {
    auto& frame = by_frame[f];
    std::sort(frame.begin(), frame.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (frame.size() != by_frame[0].size())
      throw EmptyDataset("episode has a varying player set; frame " +
                         std::to_string(f));
    gt_[f].reserve(frame.size());
    for (const auto& [id, p] : frame) gt_[f].push_back(p);
  }
}

const StackedMap& DiskEpisodeSource::frame_map(int frame) const {
  if (cached_frame_ != frame) {
    char name[64];
    std::snprintf(name, sizeof(name), "/frame_%06d.pthm", frame);
    cache_ = read_pthm(dir_ + name);
    cached_frame_ = frame;
  }
  return cache_;
}

std::vector<Crop> DiskEpisodeSource::crops_at(int frame,
                                              const std::vector<WorldPoint>& centers,
                                              int side) const {
  const StackedMap& map = frame_map(frame);
  std::vector<Crop> crops(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i)
    crops[i] = crop_at(map, centers[i], side);
  return crops;
}

// ---------------------------------------------------------------------------
// Window loss

double window_loss(const EpisodeSource& ep, int k_begin, int k_end,
                   std::vector<nn::LstmState>& states, const TrackerParams& params,
                   const TrackerConfig& cfg, int warmup_frames, TrackerParams* grad,
                   const TrainConfig* tcfg, Rng* jitter_rng, JitterState* jitter) {
  const int n = ep.player_count();
  if (n == 0) throw EmptyDataset("episode has no players");
  const bool perturb = tcfg && jitter_rng && tcfg->center_jitter > 0.0;
  if (perturb && jitter && jitter->offsets.empty()) {
    std::normal_distribution<double> d(0.0, tcfg->center_jitter);
    jitter->offsets.resize(n);
    for (auto& o : jitter->offsets) o = {d(*jitter_rng), d(*jitter_rng)};
  }

  struct FrameRecord {
    FrameEval eval;
    Matrix d_pred;  // filled on the forward sweep
    bool counted = false;
  };
  std::vector<FrameRecord> records;
  records.reserve(k_end - k_begin);

  std::vector<WorldPoint> chained;  // self-anchoring: last predictions
  double sq_sum = 0.0;
  long counted = 0;
  for (int k = k_begin; k < k_end; ++k) {
    auto prev = ep.positions(k - 1);
    if (perturb) {
      // AR(1) drift per player; iid draws when no state is carried.
      const double rho = jitter ? tcfg->jitter_rho : 0.0;
      std::normal_distribution<double> d(
          0.0, tcfg->center_jitter * std::sqrt(1.0 - rho * rho));
      for (int p = 0; p < n; ++p) {
        Vec2 step(d(*jitter_rng), d(*jitter_rng));
        if (jitter) {
          jitter->offsets[p] = rho * jitter->offsets[p] + step;
          step = jitter->offsets[p];
        }
        prev[p].x += step.x();
        prev[p].y += step.y();
      }
    }
    if (tcfg && tcfg->self_anchor && !chained.empty()) prev = chained;
    const auto target = ep.positions(k);
    const auto crops = ep.crops_at(k, prev, cfg.crop_side);

    FrameRecord rec;
    const auto pred = grad
        ? network_forward(crops, prev, states, params, cfg, &rec.eval)
        : network_forward(crops, prev, states, params, cfg, nullptr);
    if (tcfg && tcfg->self_anchor) chained = pred;

    rec.counted = k > warmup_frames;
    rec.d_pred = Matrix::Zero(2, n);
    if (rec.counted) {
      for (int p = 0; p < n; ++p) {
        const Vec2 err = pred[p].vec() - target[p].vec();
        sq_sum += err.squaredNorm();
        rec.d_pred.col(p) = 2.0 * err;
        ++counted;
      }
    }
    if (grad) records.push_back(std::move(rec));
  }
  if (counted == 0) return 0.0;
  const double loss = sq_sum / counted;

  if (grad) {
    std::vector<Vector> dh, dc;
    for (int idx = static_cast<int>(records.size()) - 1; idx >= 0; --idx) {
      auto& rec = records[idx];
      rec.d_pred /= static_cast<double>(counted);
      network_backward(rec.eval, params, cfg, rec.d_pred, dh, dc, *grad);
    }
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Training loop

TrainStats train(const std::vector<const EpisodeSource*>& episodes,
                 TrackerParams& params, const TrackerConfig& cfg,
                 const TrainConfig& tcfg) {
  if (episodes.empty()) throw EmptyDataset("no training episodes");
  for (const auto* ep : episodes)
    if (ep->frame_count() < 2) throw EmptyDataset("episode shorter than 2 frames");

  auto param_refs = collect_params(params);
  TrackerParams grad = TrackerParams::zeros_like(params);
  auto grad_refs = collect_params(grad);
  nn::AdamState adam;

  TrainStats stats;
  Rng jitter_rng(tcfg.seed * 0x9e3779b97f4a7c15ull + 1);
  for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
    double epoch_sum = 0.0;
    long epoch_windows = 0;
    for (const auto* ep : episodes) {
      std::vector<nn::LstmState> states(
          ep->player_count(), nn::LstmState::zero(params.f_t.hidden()));
      JitterState jitter;
      const int frames = ep->frame_count();
      for (int k0 = 1; k0 < frames; k0 += tcfg.window) {
        const int k1 = std::min(frames, k0 + tcfg.window);
        nn::zero_all(grad_refs);
        const double loss =
            window_loss(*ep, k0, k1, states, params, cfg, tcfg.warmup_frames,
                        &grad, &tcfg, &jitter_rng, &jitter);
        nn::adam_step(param_refs, grad_refs, adam, tcfg.lr);
        stats.window_losses.push_back(loss);
        epoch_sum += loss;
        ++epoch_windows;
      }
    }
    stats.epoch_losses.push_back(epoch_windows ? epoch_sum / epoch_windows : 0.0);
  }
  return stats;
}

double evaluate_regression_error(const EpisodeSource& ep, const TrackerParams& params,
                                 const TrackerConfig& cfg, int warmup_frames) {
  const int n = ep.player_count();
  std::vector<nn::LstmState> states(n, nn::LstmState::zero(params.f_t.hidden()));
  double dist_sum = 0.0;
  long counted = 0;
  for (int k = 1; k < ep.frame_count(); ++k) {
    const auto prev = ep.positions(k - 1);
    const auto target = ep.positions(k);
    const auto crops = ep.crops_at(k, prev, cfg.crop_side);
    const auto pred = network_forward(crops, prev, states, params, cfg, nullptr);
    if (k <= warmup_frames) continue;
    for (int p = 0; p < n; ++p) {
      dist_sum += (pred[p].vec() - target[p].vec()).norm();
      ++counted;
    }
  }
  return counted ? dist_sum / counted : 0.0;
}

}  // namespace pitchtrack
