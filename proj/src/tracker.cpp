#include "pitchtrack/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "pitchtrack/util.hpp"

namespace pitchtrack {

using nn::Matrix;
using nn::Vector;

EncoderKind encoder_kind_from_string(const std::string& s) {
  if (s == "mlp") return EncoderKind::kMlp;
  if (s == "mixed1") return EncoderKind::kMixed1;
  if (s == "mixed2") return EncoderKind::kMixed2;
  if (s == "coordconv") return EncoderKind::kCoordConv;
  if (s == "conv") return EncoderKind::kConv;
  throw ConfigInvalid("unknown detection encoder '" + s + "'");
}

std::string to_string(EncoderKind k) {
  switch (k) {
    case EncoderKind::kMlp: return "mlp";
    case EncoderKind::kMixed1: return "mixed1";
    case EncoderKind::kMixed2: return "mixed2";
    case EncoderKind::kCoordConv: return "coordconv";
    case EncoderKind::kConv: return "conv";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Detection encoder

namespace {

// Cells are enumerated row-major: cell = iy * side + ix.
Matrix crop_to_matrix(const Crop& crop) {
  const int side = crop.side;
  Matrix x(crop.channel_count(), side * side);
  for (int c = 0; c < crop.channel_count(); ++c) {
    const auto& ch = crop.channels[c];
    for (int iy = 0; iy < side; ++iy)
      for (int ix = 0; ix < side; ++ix) x(c, iy * side + ix) = ch(iy, ix);
  }
  return x;
}

Matrix row_to_grid(const Eigen::RowVectorXd& row, int side) {
  Matrix m(side, side);
  for (int iy = 0; iy < side; ++iy)
    for (int ix = 0; ix < side; ++ix) m(iy, ix) = row(iy * side + ix);
  return m;
}

Eigen::RowVectorXd grid_to_row(const Matrix& m) {
  const int side = static_cast<int>(m.rows());
  Eigen::RowVectorXd row(side * side);
  for (int iy = 0; iy < side; ++iy)
    for (int ix = 0; ix < side; ++ix) row(iy * side + ix) = m(iy, ix);
  return row;
}

Vector flatten_grid(const Matrix& m) { return grid_to_row(m).transpose(); }

Matrix unflatten_grid(const Vector& v, int side) {
  return row_to_grid(v.transpose(), side);
}

}  // namespace

DetectionEncoder DetectionEncoder::zeros_like(const DetectionEncoder& o) {
  DetectionEncoder z = o;
  if (z.mix.w.size()) z.mix = nn::Conv1x1::zeros_like(o.mix);
  if (!z.mlp.layers.empty()) z.mlp = nn::Mlp::zeros_like(o.mlp);
  if (!z.conv.layers.empty()) z.conv = nn::ConvStack::zeros_like(o.conv);
  return z;
}

DetectionEncoder make_detection_encoder(EncoderKind kind, int channels,
                                        int crop_side, int down_side, Rng& rng) {
  DetectionEncoder enc;
  enc.kind = kind;
  enc.channels = channels;
  enc.crop_side = crop_side;
  enc.down_side = down_side;

  const std::vector<int> head = {1024, 512, 256, TrackerConfig::kDetectionDim};
  const int cells = down_side * down_side;
  switch (kind) {
    case EncoderKind::kMixed1:
      enc.mix = nn::make_conv1x1(channels, rng);
      enc.mlp = nn::make_mlp(cells, head, rng);
      enc.down_op = area_average_operator(crop_side, down_side);
      break;
    case EncoderKind::kMixed2:
      enc.mlp = nn::make_mlp(cells, head, rng);
      enc.down_op = area_average_operator(crop_side, down_side);
      break;
    case EncoderKind::kMlp:
      enc.mlp = nn::make_mlp(channels * cells, head, rng);
      enc.down_op = area_average_operator(crop_side, down_side);
      break;
    case EncoderKind::kCoordConv:
    case EncoderKind::kConv: {
      const int in_ch = channels + (kind == EncoderKind::kCoordConv ? 2 : 0);
      enc.conv.layers = {nn::make_conv2d(in_ch, 32, 3, 2, rng),
                         nn::make_conv2d(32, 64, 3, 2, rng),
                         nn::make_conv2d(64, TrackerConfig::kDetectionDim, 3, 2, rng)};
      break;
    }
  }
  return enc;
}

namespace {

bool has_mlp_head(EncoderKind k) {
  return k == EncoderKind::kMlp || k == EncoderKind::kMixed1 ||
         k == EncoderKind::kMixed2;
}

// Input column to the MLP head for one crop.
Vector head_input(const DetectionEncoder& enc, const Matrix& x,
                  Matrix* conv_in /* stored for Mixed1 backward */) {
  const int side = enc.crop_side;
  switch (enc.kind) {
    case EncoderKind::kMixed1: {
      if (conv_in) *conv_in = x;
      const Eigen::RowVectorXd mixed = nn::conv1x1_forward(enc.mix, x);
      return flatten_grid(enc.down_op * row_to_grid(mixed, side) *
                          enc.down_op.transpose());
    }
    case EncoderKind::kMixed2: {
      const Eigen::RowVectorXd summed = x.colwise().sum();
      return flatten_grid(enc.down_op * row_to_grid(summed, side) *
                          enc.down_op.transpose());
    }
    case EncoderKind::kMlp: {
      Vector z(enc.channels * enc.down_side * enc.down_side);
      for (int c = 0; c < enc.channels; ++c)
        z.segment(static_cast<Eigen::Index>(c) * enc.down_side * enc.down_side,
                  enc.down_side * enc.down_side) =
            flatten_grid(enc.down_op * row_to_grid(x.row(c), side) *
                         enc.down_op.transpose());
      return z;
    }
    default:
      throw ShapeMismatch("head_input called for conv encoder");
  }
}

Matrix with_coord_channels(const DetectionEncoder& enc, const Matrix& x) {
  if (enc.kind != EncoderKind::kCoordConv) return x;
  const int side = enc.crop_side;
  Matrix out(x.rows() + 2, x.cols());
  out.topRows(x.rows()) = x;
  for (int iy = 0; iy < side; ++iy)
    for (int ix = 0; ix < side; ++ix) {
      const int cell = iy * side + ix;
      out(x.rows(), cell) = 2.0 * ix / (side - 1) - 1.0;
      out(x.rows() + 1, cell) = 2.0 * iy / (side - 1) - 1.0;
    }
  return out;
}

}  // namespace

nn::Matrix encode_detections(const DetectionEncoder& enc, const std::vector<Crop>& crops,
                             DetectionBatchTape* tape) {
  const int n = static_cast<int>(crops.size());
  for (const auto& c : crops) {
    if (c.side != enc.crop_side)
      throw ShapeMismatch("crop side " + std::to_string(c.side) + ", encoder expects " +
                          std::to_string(enc.crop_side));
    if (c.channel_count() != enc.channels)
      throw ShapeMismatch("crop channels " + std::to_string(c.channel_count()) +
                          ", encoder expects " + std::to_string(enc.channels));
  }

  if (has_mlp_head(enc.kind)) {
    Matrix z(enc.mlp.input_dim(), n);
    if (tape) tape->conv_in.assign(n, {});
    parallel_for(n, [&](int p) {
      const Matrix x = crop_to_matrix(crops[p]);
      z.col(p) = head_input(enc, x, tape ? &tape->conv_in[p] : nullptr);
    });
    return nn::mlp_forward(enc.mlp, z, tape ? &tape->mlp : nullptr);
  }

  Matrix out(TrackerConfig::kDetectionDim, n);
  if (tape) tape->conv_stack.assign(n, {});
  parallel_for(n, [&](int p) {
    const Matrix x = with_coord_channels(enc, crop_to_matrix(crops[p]));
    out.col(p) = nn::conv_stack_forward(enc.conv, x, enc.crop_side, enc.crop_side,
                                        tape ? &tape->conv_stack[p] : nullptr);
  });
  return out;
}

void encode_detections_backward(const DetectionEncoder& enc, const DetectionBatchTape& tape,
                                const nn::Matrix& d_embed, DetectionEncoder& grad) {
  if (has_mlp_head(enc.kind)) {
    const Matrix dz = nn::mlp_backward(enc.mlp, tape.mlp, d_embed, grad.mlp);
    if (enc.kind == EncoderKind::kMixed1) {
      for (int p = 0; p < dz.cols(); ++p) {
        const Matrix d_down = unflatten_grid(dz.col(p), enc.down_side);
        const Matrix d_grid = enc.down_op.transpose() * d_down * enc.down_op;
        nn::conv1x1_backward(enc.mix, tape.conv_in[p], grid_to_row(d_grid), grad.mix);
      }
    }
    return;
  }
  for (std::size_t p = 0; p < tape.conv_stack.size(); ++p)
    nn::conv_stack_backward(enc.conv, tape.conv_stack[p], d_embed.col(p), grad.conv);
}

nn::Vector encode_detection(const DetectionEncoder& enc, const Crop& crop,
                            DetectionBatchTape* tape) {
  return encode_detections(enc, {crop}, tape).col(0);
}

// ---------------------------------------------------------------------------
// Graph

PositionGraph build_graph(const std::vector<WorldPoint>& positions,
                          const nn::Matrix& fused, double radius) {
  PositionGraph g;
  g.n = static_cast<int>(positions.size());
  if (fused.cols() != g.n)
    throw ShapeMismatch("one embedding column per tracked player required");
  g.positions = positions;
  g.x0 = fused;
  g.degree.assign(g.n, 0);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      if (i == j) continue;
      if (distance(positions[i], positions[j]) < radius) {
        g.edges.emplace_back(i, j);
        ++g.degree[i];
      }
    }
  g.e.resize(2, static_cast<Eigen::Index>(g.edges.size()));
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto [i, j] = g.edges[k];
    g.e.col(k) = positions[j].vec() - positions[i].vec();
  }
  return g;
}

TrackerParams TrackerParams::zeros_like(const TrackerParams& o) {
  TrackerParams z;
  z.f_d = DetectionEncoder::zeros_like(o.f_d);
  z.f_t = nn::LstmCell::zeros_like(o.f_t);
  for (int r = 0; r < 2; ++r) {
    if (!o.f_m[r].layers.empty()) z.f_m[r] = nn::Mlp::zeros_like(o.f_m[r]);
    if (!o.f_n[r].layers.empty()) z.f_n[r] = nn::Mlp::zeros_like(o.f_n[r]);
  }
  z.f_p = nn::Mlp::zeros_like(o.f_p);
  return z;
}

TrackerParams make_tracker_params(const TrackerConfig& cfg, int channels,
                                  std::uint64_t seed) {
  if (cfg.rounds < 0 || cfg.rounds > 2)
    throw ConfigInvalid("rounds must be 0, 1 or 2");
  Rng rng(seed);
  TrackerParams p;
  p.f_d = make_detection_encoder(cfg.encoder, channels, cfg.crop_side,
                                 cfg.crop_downsample, rng);
  p.f_t = nn::make_lstm(2, TrackerConfig::kTrajectoryDim, rng);
  int dim_x = TrackerConfig::kFusedDim;
  for (int r = 0; r < cfg.rounds; ++r) {
    p.f_m[r] = nn::make_mlp(2 * dim_x + 2, {128, TrackerConfig::kMessageDim}, rng);
    p.f_n[r] = nn::make_mlp(dim_x + TrackerConfig::kMessageDim,
                            {TrackerConfig::kNodeDim, TrackerConfig::kNodeDim}, rng);
    dim_x = TrackerConfig::kNodeDim;
  }
  p.f_p = nn::make_mlp(dim_x, {128, 2}, rng);
  // Zero regression head: displacements start at zero instead of saturating
  // the per-frame clamp, whose Jacobian has no radial component.
  p.f_p.layers.back().w.setZero();
  p.f_p.layers.back().b.setZero();
  return p;
}

std::vector<nn::TensorRef> collect_params(TrackerParams& p) {
  std::vector<nn::TensorRef> refs;
  switch (p.f_d.kind) {
    case EncoderKind::kMixed1:
      nn::append_params(p.f_d.mix, "f_d.mix", refs);
      nn::append_params(p.f_d.mlp, "f_d.mlp", refs);
      break;
    case EncoderKind::kMixed2:
    case EncoderKind::kMlp:
      nn::append_params(p.f_d.mlp, "f_d.mlp", refs);
      break;
    case EncoderKind::kCoordConv:
    case EncoderKind::kConv:
      nn::append_params(p.f_d.conv, "f_d.conv", refs);
      break;
  }
  nn::append_params(p.f_t, "f_t", refs);
  for (int r = 0; r < 2; ++r) {
    if (!p.f_m[r].layers.empty())
      nn::append_params(p.f_m[r], "f_m" + std::to_string(r + 1), refs);
    if (!p.f_n[r].layers.empty())
      nn::append_params(p.f_n[r], "f_n" + std::to_string(r + 1), refs);
  }
  nn::append_params(p.f_p, "f_p", refs);
  return refs;
}

// ---------------------------------------------------------------------------
// Message passing

nn::Matrix message_pass(const PositionGraph& g, const TrackerParams& p,
                        const TrackerConfig& cfg, MessagePassTape* tape) {
  const auto n_edges = static_cast<Eigen::Index>(g.edges.size());
  if (tape) tape->rounds.assign(cfg.rounds, {});

  Matrix x = g.x0;
  for (int r = 0; r < cfg.rounds; ++r) {
    MessagePassTape::Round* rt = tape ? &tape->rounds[r] : nullptr;
    const Eigen::Index dim_x = x.rows();

    Matrix mean_msg = Matrix::Zero(TrackerConfig::kMessageDim, g.n);
    if (cfg.use_message_passing && n_edges > 0) {
      Matrix msg_in(2 * dim_x + 2, n_edges);
      for (Eigen::Index k = 0; k < n_edges; ++k) {
        const auto [i, j] = g.edges[k];
        msg_in.col(k) << x.col(i), x.col(j), g.e.col(k);
      }
      const Matrix msgs =
          nn::mlp_forward(p.f_m[r], msg_in, rt ? &rt->msg_mlp : nullptr);
      for (Eigen::Index k = 0; k < n_edges; ++k)
        mean_msg.col(g.edges[k].first) += msgs.col(k);
      for (int i = 0; i < g.n; ++i)
        if (g.degree[i] > 0) mean_msg.col(i) /= g.degree[i];
      if (rt) rt->msg_in = std::move(msg_in);
    }

    Matrix node_in(dim_x + TrackerConfig::kMessageDim, g.n);
    node_in.topRows(dim_x) = x;
    node_in.bottomRows(TrackerConfig::kMessageDim) = mean_msg;
    x = nn::mlp_forward(p.f_n[r], node_in, rt ? &rt->node_mlp : nullptr);
    if (rt) rt->node_in = std::move(node_in);
  }
  return x;
}

nn::Matrix message_pass_backward(const PositionGraph& g, const TrackerParams& p,
                                 const TrackerConfig& cfg, const MessagePassTape& tape,
                                 const nn::Matrix& dx_out, TrackerParams& grad) {
  const auto n_edges = static_cast<Eigen::Index>(g.edges.size());
  Matrix dx = dx_out;
  for (int r = cfg.rounds - 1; r >= 0; --r) {
    const auto& rt = tape.rounds[r];
    const Eigen::Index dim_x = rt.node_in.rows() - TrackerConfig::kMessageDim;

    const Matrix d_node_in = nn::mlp_backward(p.f_n[r], rt.node_mlp, dx, grad.f_n[r]);
    Matrix dx_prev = d_node_in.topRows(dim_x);

    if (cfg.use_message_passing && n_edges > 0) {
      const Matrix d_mean = d_node_in.bottomRows(TrackerConfig::kMessageDim);
      Matrix d_msgs(TrackerConfig::kMessageDim, n_edges);
      for (Eigen::Index k = 0; k < n_edges; ++k) {
        const int i = g.edges[k].first;
        d_msgs.col(k) = d_mean.col(i) / g.degree[i];
      }
      const Matrix d_msg_in =
          nn::mlp_backward(p.f_m[r], rt.msg_mlp, d_msgs, grad.f_m[r]);
      for (Eigen::Index k = 0; k < n_edges; ++k) {
        const auto [i, j] = g.edges[k];
        dx_prev.col(i) += d_msg_in.col(k).segment(0, dim_x);
        dx_prev.col(j) += d_msg_in.col(k).segment(dim_x, dim_x);
      }
    }
    dx = std::move(dx_prev);
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Regression

nn::Matrix regress_displacements(const nn::Mlp& f_p, const nn::Matrix& x_final,
                                 double max_step, RegressTape* tape) {
  Matrix raw = nn::mlp_forward(f_p, x_final, tape ? &tape->mlp : nullptr);
  if (tape) tape->raw = raw;
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    const double norm = raw.col(c).norm();
    if (norm > max_step) raw.col(c) *= max_step / norm;
  }
  return raw;
}

nn::Matrix regress_backward(const nn::Mlp& f_p, const RegressTape& tape,
                            double max_step, const nn::Matrix& d_disp, nn::Mlp& grad) {
  Matrix d_raw = d_disp;
  for (Eigen::Index c = 0; c < tape.raw.cols(); ++c) {
    const double norm = tape.raw.col(c).norm();
    if (norm > max_step) {
      // y = r * s/|r| has Jacobian (s/|r|) (I - rr^T/|r|^2).
      const Vector rhat = tape.raw.col(c) / norm;
      d_raw.col(c) = (max_step / norm) *
                     (d_disp.col(c) - rhat * rhat.dot(d_disp.col(c)));
    }
  }
  return nn::mlp_backward(f_p, tape.mlp, d_raw, grad);
}

// ---------------------------------------------------------------------------
// Whole network, one frame

namespace {

Vector normalized_position(const WorldPoint& p, const TrackerConfig& cfg) {
  Vector v(2);
  v << 2.0 * p.x / cfg.pitch_length - 1.0, 2.0 * p.y / cfg.pitch_width - 1.0;
  return v;
}

}  // namespace

nn::Vector encode_trajectory(const nn::LstmCell& f_t, const WorldPoint& prev_position,
                             nn::LstmState& state, const TrackerConfig& cfg,
                             nn::LstmTape* tape) {
  return nn::lstm_step(f_t, normalized_position(prev_position, cfg), state, tape);
}

std::vector<WorldPoint> network_forward(const std::vector<Crop>& crops,
                                        const std::vector<WorldPoint>& prev_positions,
                                        std::vector<nn::LstmState>& states,
                                        const TrackerParams& params,
                                        const TrackerConfig& cfg, FrameEval* tape) {
  const int n = static_cast<int>(crops.size());
  if (static_cast<int>(prev_positions.size()) != n)
    throw ShapeMismatch("one previous position per crop required");
  if (cfg.use_trajectory && static_cast<int>(states.size()) != n)
    throw ShapeMismatch("one LSTM state per player required");

  if (tape) tape->prev_positions = prev_positions;

  const Matrix det =
      encode_detections(params.f_d, crops, tape ? &tape->det : nullptr);

  Matrix fused(TrackerConfig::kFusedDim, n);
  fused.topRows(TrackerConfig::kDetectionDim) = det;
  if (cfg.use_trajectory) {
    if (tape) tape->lstm.assign(n, {});
    for (int p = 0; p < n; ++p) {
      fused.col(p).segment(TrackerConfig::kDetectionDim,
                           TrackerConfig::kTrajectoryDim) =
          encode_trajectory(params.f_t, prev_positions[p], states[p], cfg,
                            tape ? &tape->lstm[p] : nullptr);
    }
  } else {
    fused.bottomRows(TrackerConfig::kTrajectoryDim).setZero();
  }

  PositionGraph graph = build_graph(prev_positions, fused, cfg.radius);
  const Matrix x_final =
      message_pass(graph, params, cfg, tape ? &tape->mp : nullptr);
  const Matrix disp = regress_displacements(params.f_p, x_final, cfg.max_step,
                                            tape ? &tape->reg : nullptr);

  std::vector<WorldPoint> out(n);
  for (int p = 0; p < n; ++p)
    out[p] = {prev_positions[p].x + disp(0, p), prev_positions[p].y + disp(1, p)};
  if (tape) {
    tape->graph = std::move(graph);
    tape->disp = disp;
  }
  return out;
}

void network_backward(const FrameEval& tape, const TrackerParams& params,
                      const TrackerConfig& cfg, const nn::Matrix& d_pred,
                      std::vector<nn::Vector>& dh, std::vector<nn::Vector>& dc,
                      TrackerParams& grad) {
  const int n = static_cast<int>(tape.prev_positions.size());
  const Matrix dx_final =
      regress_backward(params.f_p, tape.reg, cfg.max_step, d_pred, grad.f_p);
  const Matrix dx0 =
      message_pass_backward(tape.graph, params, cfg, tape.mp, dx_final, grad);

  encode_detections_backward(params.f_d, tape.det,
                             dx0.topRows(TrackerConfig::kDetectionDim), grad.f_d);

  if (!cfg.use_trajectory) return;
  const int hdim = params.f_t.hidden();
  if (static_cast<int>(dh.size()) != n) dh.assign(n, Vector::Zero(hdim));
  if (static_cast<int>(dc.size()) != n) dc.assign(n, Vector::Zero(hdim));
  for (int p = 0; p < n; ++p) {
    const Vector dh_total =
        dh[p] + dx0.col(p).segment(TrackerConfig::kDetectionDim,
                                   TrackerConfig::kTrajectoryDim);
    Vector dx_in, dh_prev, dc_prev;
    nn::lstm_backward(params.f_t, tape.lstm[p], dh_total, dc[p], dx_in, dh_prev,
                      dc_prev, grad.f_t);
    dh[p] = dh_prev;
    dc[p] = dc_prev;
  }
}

// ---------------------------------------------------------------------------
// Lifecycle

std::vector<std::size_t> advance_lifecycle(std::vector<Track>& tracks, int& next_id,
                                           const std::vector<WorldPoint>& maxima,
                                           const TrackerConfig& cfg, int frame) {
  for (auto& t : tracks) {
    if (!t.active) continue;
    bool seen = false;
    for (const auto& m : maxima)
      if (distance(m, t.last_pos()) <= cfg.miss_radius) {
        seen = true;
        break;
      }
    t.miss_count = seen ? 0 : t.miss_count + 1;
    if (t.miss_count >= cfg.terminate_after) t.active = false;
  }

  std::vector<std::size_t> spawned;
  for (const auto& m : maxima) {
    bool claimed = false;
    for (const auto& t : tracks) {
      if (!t.active) continue;
      if (distance(m, t.last_pos()) <= cfg.init_min_dist) {
        claimed = true;
        break;
      }
    }
    if (claimed) continue;
    Track t;
    t.id = next_id++;
    t.history.emplace_back(frame, m);
    tracks.push_back(std::move(t));
    spawned.push_back(tracks.size() - 1);
  }
  return spawned;
}

void tracker_step(TrackerState& state, const StackedMap& t_d,
                  const TrackerParams& params, const TrackerConfig& cfg, int frame) {
  const auto& grid = t_d.grid;
  if (std::abs(grid.width * grid.resolution - cfg.pitch_length) > grid.resolution ||
      std::abs(grid.height * grid.resolution - cfg.pitch_width) > grid.resolution)
    throw GridMismatch("stacked map raster does not cover the configured pitch");
  if (t_d.channel_count() != params.f_d.channels)
    throw ShapeMismatch("stacked map channels do not match the detection encoder");

  std::vector<std::size_t> actives;
  for (std::size_t i = 0; i < state.tracks.size(); ++i)
    if (state.tracks[i].active) actives.push_back(i);

  if (!actives.empty()) {
    const int n = static_cast<int>(actives.size());
    std::vector<Crop> crops(n);
    std::vector<WorldPoint> prev(n);
    std::vector<nn::LstmState> states(n);
    for (int k = 0; k < n; ++k) prev[k] = state.tracks[actives[k]].last_pos();
    parallel_for(n, [&](int k) { crops[k] = crop_at(t_d, prev[k], cfg.crop_side); });
    for (int k = 0; k < n; ++k) states[k] = state.tracks[actives[k]].lstm;

    const auto predicted =
        network_forward(crops, prev, states, params, cfg, nullptr);
    for (int k = 0; k < n; ++k) {
      Track& t = state.tracks[actives[k]];
      t.history.emplace_back(frame, predicted[k]);
      t.lstm = std::move(states[k]);
    }
  }

  const auto maxima =
      local_maxima(sum_channels(t_d), cfg.init_threshold, cfg.init_min_dist);
  const auto spawned =
      advance_lifecycle(state.tracks, state.next_id, maxima, cfg, frame);
  for (auto idx : spawned)
    state.tracks[idx].lstm = nn::LstmState::zero(params.f_t.hidden());
}

}  // namespace pitchtrack
