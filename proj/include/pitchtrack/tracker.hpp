#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pitchtrack/heatmap.hpp"
#include "pitchtrack/nn.hpp"
#include "pitchtrack/types.hpp"

// Tracking-by-regression core: per-player detection and trajectory
// embeddings are fused into node features of a neighborhood graph, refined
// by two rounds of message passing, and decoded into a per-player
// displacement that extends the track.

namespace pitchtrack {

enum class EncoderKind { kMlp, kMixed1, kMixed2, kCoordConv, kConv };

EncoderKind encoder_kind_from_string(const std::string& s);
std::string to_string(EncoderKind k);

struct TrackerConfig {
  double radius = 3.0;          // m, neighborhood graph edges
  int rounds = 2;               // message passing iterations
  int crop_side = 81;           // cells
  int crop_downsample = 32;     // cells
  int terminate_after = 20;     // consecutive missed frames
  float init_threshold = 1.0f;  // summed-map activation for track birth
  double init_min_dist = 1.5;   // m, birth exclusion radius
  double miss_radius = 1.0;     // m, maximum gap between track and a peak
  double max_step = 1.5;        // m, per-frame displacement clamp
  bool use_trajectory = true;
  bool use_message_passing = true;
  EncoderKind encoder = EncoderKind::kMixed1;
  double pitch_length = kPitchLength;
  double pitch_width = kPitchWidth;

  static constexpr int kDetectionDim = 128;
  static constexpr int kTrajectoryDim = 128;
  static constexpr int kFusedDim = kDetectionDim + kTrajectoryDim;
  static constexpr int kMessageDim = 32;
  static constexpr int kNodeDim = 384;
};

// ---------------------------------------------------------------------------
// Detection embedding f_D

struct DetectionEncoder {
  EncoderKind kind = EncoderKind::kMixed1;
  int channels = 4;
  int crop_side = 81;
  int down_side = 32;
  nn::Conv1x1 mix;        // Mixed1 channel aggregation
  nn::Mlp mlp;            // head for Mlp/Mixed1/Mixed2
  nn::ConvStack conv;     // CoordConv/Conv trunk
  nn::Matrix down_op;     // fixed area-average operator, not a parameter

  static DetectionEncoder zeros_like(const DetectionEncoder& o);
};

DetectionEncoder make_detection_encoder(EncoderKind kind, int channels,
                                        int crop_side, int down_side, Rng& rng);

struct DetectionBatchTape {
  std::vector<nn::Matrix> conv_in;            // Mixed1: raw channel matrices
  nn::MlpTape mlp;                            // batched head
  std::vector<nn::ConvStackTape> conv_stack;  // per player, conv kinds
};

// Crops as matrix columns of 128-d embeddings, one per player.
nn::Matrix encode_detections(const DetectionEncoder& enc, const std::vector<Crop>& crops,
                             DetectionBatchTape* tape = nullptr);
void encode_detections_backward(const DetectionEncoder& enc, const DetectionBatchTape& tape,
                                const nn::Matrix& d_embed, DetectionEncoder& grad);

nn::Vector encode_detection(const DetectionEncoder& enc, const Crop& crop,
                            DetectionBatchTape* tape = nullptr);

// ---------------------------------------------------------------------------
// Trajectory embedding f_T

// Feeds the previous position, normalized to [-1, 1] by the pitch
// half-dimensions, into the LSTM cell; the state advances in place.
nn::Vector encode_trajectory(const nn::LstmCell& f_t, const WorldPoint& prev_position,
                             nn::LstmState& state, const TrackerConfig& cfg,
                             nn::LstmTape* tape = nullptr);

// ---------------------------------------------------------------------------
// Position graph and message passing

struct PositionGraph {
  int n = 0;
  std::vector<WorldPoint> positions;       // t_{k-1} anchors
  nn::Matrix x0;                           // fused embeddings, kFusedDim x n
  std::vector<std::pair<int, int>> edges;  // directed (i, j); j in N(i)
  nn::Matrix e;                            // 2 x edges, e_ij = pos_j - pos_i
  std::vector<int> degree;                 // |N(i)|
};

PositionGraph build_graph(const std::vector<WorldPoint>& positions,
                          const nn::Matrix& fused, double radius);

struct TrackerParams {
  DetectionEncoder f_d;
  nn::LstmCell f_t;
  std::array<nn::Mlp, 2> f_m;  // message nets, one per round
  std::array<nn::Mlp, 2> f_n;  // node-update nets, one per round
  nn::Mlp f_p;

  static TrackerParams zeros_like(const TrackerParams& o);
};

TrackerParams make_tracker_params(const TrackerConfig& cfg, int channels,
                                  std::uint64_t seed);

// Fixed enumeration of every trainable tensor; order defines checkpoint
// layout and optimizer slots.
std::vector<nn::TensorRef> collect_params(TrackerParams& p);

struct MessagePassTape {
  struct Round {
    nn::Matrix msg_in;       // [x_i; x_j; e_ij] columns
    nn::MlpTape msg_mlp;
    nn::Matrix node_in;      // [x_i; mean message] columns
    nn::MlpTape node_mlp;
  };
  std::vector<Round> rounds;
};

// Runs cfg.rounds rounds; with use_message_passing off every node sees a
// zero message mean, which is also the convention for isolated nodes.
nn::Matrix message_pass(const PositionGraph& g, const TrackerParams& p,
                        const TrackerConfig& cfg, MessagePassTape* tape = nullptr);
nn::Matrix message_pass_backward(const PositionGraph& g, const TrackerParams& p,
                                 const TrackerConfig& cfg, const MessagePassTape& tape,
                                 const nn::Matrix& dx_out, TrackerParams& grad);

// ---------------------------------------------------------------------------
// Position regression f_P

struct RegressTape {
  nn::MlpTape mlp;
  nn::Matrix raw;  // pre-clamp displacements, 2 x n
};

// Returns per-player displacements with norm clamped to max_step.
nn::Matrix regress_displacements(const nn::Mlp& f_p, const nn::Matrix& x_final,
                                 double max_step, RegressTape* tape = nullptr);
nn::Matrix regress_backward(const nn::Mlp& f_p, const RegressTape& tape,
                            double max_step, const nn::Matrix& d_disp, nn::Mlp& grad);

// ---------------------------------------------------------------------------
// Whole-network forward/backward for one frame

struct FrameEval {
  std::vector<WorldPoint> prev_positions;
  DetectionBatchTape det;
  std::vector<nn::LstmTape> lstm;  // per player; empty when trajectory is off
  PositionGraph graph;
  MessagePassTape mp;
  RegressTape reg;
  nn::Matrix disp;  // clamped, 2 x n
};

// Regresses new positions for every player. `states` advance in place (one
// per player, ignored when cfg.use_trajectory is false).
std::vector<WorldPoint> network_forward(const std::vector<Crop>& crops,
                                        const std::vector<WorldPoint>& prev_positions,
                                        std::vector<nn::LstmState>& states,
                                        const TrackerParams& params,
                                        const TrackerConfig& cfg,
                                        FrameEval* tape = nullptr);

// d_pred is dL/d(predicted position), 2 x n. dh/dc carry the recurrent
// gradient from the following frame (resized and zeroed here when empty) and
// leave holding the gradient for the preceding frame's state.
void network_backward(const FrameEval& tape, const TrackerParams& params,
                      const TrackerConfig& cfg, const nn::Matrix& d_pred,
                      std::vector<nn::Vector>& dh, std::vector<nn::Vector>& dc,
                      TrackerParams& grad);

// ---------------------------------------------------------------------------
// Track lifecycle

struct Track {
  int id = 0;
  std::vector<std::pair<int, WorldPoint>> history;  // (frame, position)
  nn::LstmState lstm;
  bool active = true;
  int miss_count = 0;

  const WorldPoint& last_pos() const { return history.back().second; }
};

// Miss counting against detected peaks, termination, and birth of new tracks
// at unclaimed peaks. Returns indices of freshly spawned tracks so callers
// can attach their per-track state.
std::vector<std::size_t> advance_lifecycle(std::vector<Track>& tracks, int& next_id,
                                           const std::vector<WorldPoint>& maxima,
                                           const TrackerConfig& cfg, int frame);

struct TrackerState {
  std::vector<Track> tracks;
  int next_id = 0;
};

// One online step: regress every active track from the stacked detection
// map at this frame, then run the lifecycle heuristics.
void tracker_step(TrackerState& state, const StackedMap& t_d,
                  const TrackerParams& params, const TrackerConfig& cfg, int frame);

}  // namespace pitchtrack
