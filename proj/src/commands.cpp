#include "pitchtrack/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pitchtrack/baseline.hpp"
#include "pitchtrack/checkpoint.hpp"
#include "pitchtrack/heatmap_io.hpp"
#include "pitchtrack/moteval.hpp"
#include "pitchtrack/render.hpp"
#include "pitchtrack/trackcsv.hpp"
#include "pitchtrack/util.hpp"

namespace pitchtrack::cli {

namespace fs = std::filesystem;

void TrackerOverrides::apply(TrackerConfig& cfg) const {
  if (ablation) {
    if (*ablation == "no-trajectory")
      cfg.use_trajectory = false;
    else if (*ablation == "no-message-passing")
      cfg.use_message_passing = false;
    else
      throw ConfigInvalid("unknown ablation '" + *ablation +
                          "' (no-trajectory | no-message-passing)");
  }
  if (encoder) cfg.encoder = encoder_kind_from_string(*encoder);
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::string& config_path, std::uint64_t seed) {
  std::ofstream os(out_dir + "/manifest.txt", std::ios::trunc);
  if (!os) throw IoError("cannot write manifest in " + out_dir);
  os << "command = " << command << "\n"
     << "config = " << config_path << "\n"
     << "seed = " << seed << "\n"
     << "git = " << git_describe() << "\n"
     << "out_dir = " << out_dir << "\n"
     << "created = " << timestamp_utc() << "\n";
}

std::vector<std::string> episode_dirs(const std::string& dataset_dir) {
  std::vector<std::string> dirs;
  if (!fs::is_directory(dataset_dir))
    throw IoError(dataset_dir + " is not a directory");
  for (const auto& entry : fs::directory_iterator(dataset_dir)) {
    if (!entry.is_directory()) continue;
    const auto name = entry.path().filename().string();
    if (name.rfind("episode_", 0) == 0) dirs.push_back(entry.path().string());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw EmptyDataset("no episode_* directories in " + dataset_dir);
  return dirs;
}

namespace {

std::string episode_dir_name(int e) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "episode_%03d", e);
  return buf;
}

RunConfig dataset_config(const std::string& dataset_dir,
                         const std::optional<std::string>& override_path) {
  return load_run_config(override_path ? *override_path
                                       : dataset_dir + "/scenario.cfg");
}

void generate_one_episode(const RunConfig& cfg, std::uint64_t episode_seed,
                          const std::string& dir) {
  fs::create_directories(dir);
  sim::ScenarioConfig scenario = cfg.scenario;
  scenario.seed = episode_seed;
  sim::EpisodeStream stream(scenario);

  std::vector<TrackRow> gt;
  std::vector<Vec2> positions;
  sim::FrameDetections dets;
  while (stream.next(positions, dets)) {
    const int frame = stream.frame_index() - 1;
    for (std::size_t i = 0; i < positions.size(); ++i)
      gt.push_back({frame, static_cast<int>(i), positions[i].x(), positions[i].y()});
    char name[64];
    std::snprintf(name, sizeof(name), "/frame_%06d.pthm", frame);
    write_pthm(dir + name, stream.render_stack(dets));
  }
  write_track_csv(dir + "/gt.csv", gt, "agent_id");
}

}  // namespace

void cmd_generate(const GenerateArgs& args) {
  RunConfig cfg = load_run_config(args.config_path);
  if (args.seed) cfg.scenario.seed = *args.seed;
  if (args.episodes) cfg.n_episodes = *args.episodes;
  if (cfg.n_episodes <= 0) throw ConfigInvalid("episode count must be positive");

  fs::create_directories(args.out_dir);
  save_run_config(args.out_dir + "/scenario.cfg", cfg);
  // Episodes are independent; fan out across the worker pool. Each worker
  // writes only its own directory, so output is scheduling-invariant.
  parallel_for(cfg.n_episodes, [&](int e) {
    generate_one_episode(cfg, cfg.scenario.seed + static_cast<std::uint64_t>(e),
                         args.out_dir + "/" + episode_dir_name(e));
  });
  write_manifest(args.out_dir, "generate", args.config_path, cfg.scenario.seed);
}

void cmd_train(const TrainArgs& args) {
  RunConfig cfg = dataset_config(args.dataset_dir, args.config_path);
  if (args.seed) cfg.train.seed = *args.seed;
  if (args.epochs) cfg.train.epochs = *args.epochs;
  args.overrides.apply(cfg.tracker);
  cfg.tracker.pitch_length = cfg.scenario.pitch_length;
  cfg.tracker.pitch_width = cfg.scenario.pitch_width;

  auto dirs = episode_dirs(args.dataset_dir);
  if (args.episodes && *args.episodes < static_cast<int>(dirs.size()))
    dirs.resize(*args.episodes);

  std::vector<std::unique_ptr<DiskEpisodeSource>> sources;
  std::vector<const EpisodeSource*> episodes;
  for (const auto& d : dirs) {
    sources.push_back(std::make_unique<DiskEpisodeSource>(d));
    episodes.push_back(sources.back().get());
  }

  TrackerParams params =
      make_tracker_params(cfg.tracker, cfg.scenario.n_cameras, cfg.train.seed);
  if (args.resume_checkpoint) {
    auto refs = collect_params(params);
    load_checkpoint(*args.resume_checkpoint, refs);
  }

  const TrainStats stats = train(episodes, params, cfg.tracker, cfg.train);

  fs::create_directories(args.out_dir);
  auto refs = collect_params(params);
  save_checkpoint(args.out_dir + "/checkpoint.ptnn", refs);
  std::ofstream loss(args.out_dir + "/loss.csv", std::ios::trunc);
  loss << "step,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < stats.window_losses.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", i, stats.window_losses[i]);
    loss << buf;
  }
  save_run_config(args.out_dir + "/train.cfg", cfg);
  write_manifest(args.out_dir, "train",
                 args.config_path.value_or(args.dataset_dir + "/scenario.cfg"),
                 cfg.train.seed);
}

namespace {

std::vector<TrackRow> tracks_to_rows(const std::vector<Track>& tracks) {
  std::vector<TrackRow> rows;
  for (const auto& t : tracks)
    for (const auto& [frame, p] : t.history) rows.push_back({frame, t.id, p.x, p.y});
  return rows;
}

std::string frame_file(const std::string& dir, int frame) {
  char name[64];
  std::snprintf(name, sizeof(name), "/frame_%06d.pthm", frame);
  return dir + name;
}

int count_frames(const std::string& dir) {
  int frames = 0;
  while (fs::exists(frame_file(dir, frames))) ++frames;
  return frames;
}

}  // namespace

void cmd_track(const TrackArgs& args) {
  RunConfig cfg = dataset_config(args.dataset_dir, args.config_path);
  args.overrides.apply(cfg.tracker);
  cfg.tracker.pitch_length = cfg.scenario.pitch_length;
  cfg.tracker.pitch_width = cfg.scenario.pitch_width;

  auto dirs = episode_dirs(args.dataset_dir);
  if (args.episodes && *args.episodes < static_cast<int>(dirs.size()))
    dirs.resize(*args.episodes);

  TrackerParams params =
      make_tracker_params(cfg.tracker, cfg.scenario.n_cameras, cfg.train.seed);
  if (!args.baseline) {
    if (args.checkpoint.empty())
      throw ConfigInvalid("a checkpoint is required unless --baseline is given");
    auto refs = collect_params(params);
    load_checkpoint(args.checkpoint, refs);
  }

  fs::create_directories(args.out_dir);
  for (std::size_t e = 0; e < dirs.size(); ++e) {
    const auto& dir = dirs[e];
    const int frames = count_frames(dir);
    if (frames == 0) throw EmptyDataset("no PTHM frames in " + dir);

    std::vector<Track> result;
    if (args.baseline) {
      BaselineTracker state;
      state.dt = cfg.scenario.dt;
      state.rng.seed(args.seed.value_or(cfg.scenario.seed));
      for (int f = 0; f < frames; ++f)
        pf_tracker_step(state, read_pthm(frame_file(dir, f)), cfg.tracker, f);
      result = std::move(state.tracks);
    } else {
      TrackerState state;
      for (int f = 0; f < frames; ++f)
        tracker_step(state, read_pthm(frame_file(dir, f)), params, cfg.tracker, f);
      result = std::move(state.tracks);
    }

    const std::string out_csv =
        args.out_dir + "/" + episode_dir_name(static_cast<int>(e)) + ".csv";
    write_track_csv(out_csv, tracks_to_rows(result), "track_id");
  }
  write_manifest(args.out_dir, args.baseline ? "track --baseline" : "track",
                 args.config_path.value_or(args.dataset_dir + "/scenario.cfg"),
                 args.seed.value_or(cfg.scenario.seed));
}

namespace {

// Accepts a csv file, a dataset directory (episode_*/gt.csv) or a directory
// of per-episode csv files.
std::vector<std::string> resolve_track_files(const std::string& path, bool gt_side) {
  if (fs::is_regular_file(path)) return {path};
  if (!fs::is_directory(path)) throw IoError(path + " does not exist");

  std::vector<std::string> files;
  if (gt_side) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_directory() &&
          entry.path().filename().string().rfind("episode_", 0) == 0 &&
          fs::exists(entry.path() / "gt.csv"))
        files.push_back((entry.path() / "gt.csv").string());
    }
  }
  if (files.empty()) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".csv")
        files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw EmptyDataset("no track csv files under " + path);
  return files;
}

}  // namespace

void cmd_eval(const EvalArgs& args) {
  const auto gt_files = resolve_track_files(args.gt_path, true);
  const auto hyp_files = resolve_track_files(args.hyp_path, false);
  if (gt_files.size() != hyp_files.size())
    throw FrameRangeMismatch("episode count mismatch: " +
                             std::to_string(gt_files.size()) + " gt vs " +
                             std::to_string(hyp_files.size()) + " hyp");

  std::vector<std::pair<FrameSet, FrameSet>> pairs;
  for (std::size_t i = 0; i < gt_files.size(); ++i)
    pairs.emplace_back(read_frameset(gt_files[i]), read_frameset(hyp_files[i]));

  std::ostringstream text, kv;
  const mot::SuiteReport suite = mot::evaluate_suite(pairs);
  if (pairs.size() == 1) {
    text << mot::format_report(suite.pooled) << "\n";
    kv << mot::report_key_values(suite.pooled);
  } else {
    for (std::size_t i = 0; i < suite.per_episode.size(); ++i)
      text << "episode " << i << ": " << mot::format_report(suite.per_episode[i])
           << "\n";
    text << "pooled:    " << mot::format_report(suite.pooled) << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", suite.mean_mota);
    text << "mean MOTA: " << buf << "\n";
    kv << mot::report_key_values(suite.pooled);
    std::snprintf(buf, sizeof(buf), "%.6f", suite.mean_mota);
    kv << "mean_mota=" << buf << "\n";
  }

  std::cout << text.str();
  if (args.out_dir) {
    fs::create_directories(*args.out_dir);
    std::ofstream(*args.out_dir + "/report.txt", std::ios::trunc) << text.str();
    std::ofstream(*args.out_dir + "/report.kv", std::ios::trunc) << kv.str();
    write_manifest(*args.out_dir, "eval", args.gt_path, 0);
  }
}

void cmd_render(const RenderArgs& args) {
  const FrameSet tracks = read_frameset(args.tracks_csv);
  fs::create_directories(args.out_dir);

  // Track id -> ordered positions seen so far (the trail).
  std::map<int, std::vector<WorldPoint>> trails;
  int last = args.frame_end;
  if (last < 0) {
    last = args.frame_begin;
    while (true) {
      char name[64];
      std::snprintf(name, sizeof(name), "/frame_%06d.pthm", last + 1);
      if (!fs::exists(args.episode_dir + name)) break;
      ++last;
    }
  }

  for (int f = 0; f <= last; ++f) {
    char name[64];
    std::snprintf(name, sizeof(name), "/frame_%06d.pthm", f);
    const std::string map_path = args.episode_dir + name;
    if (!fs::exists(map_path))
      throw IoError("missing frame file " + map_path);

    const auto it = tracks.find(f);
    if (it != tracks.end())
      for (const auto& [id, p] : it->second) {
        auto& trail = trails[id];
        trail.push_back(p);
        if (trail.size() > 60) trail.erase(trail.begin());
      }
    if (f < args.frame_begin) continue;

    const StackedMap t_d = read_pthm(map_path);
    std::vector<std::pair<int, std::vector<WorldPoint>>> trail_list(trails.begin(),
                                                                    trails.end());
    char out_name[64];
    std::snprintf(out_name, sizeof(out_name), "/frame_%06d.ppm", f);
    write_ppm(args.out_dir + out_name,
              render_frame(sum_channels(t_d), trail_list));
  }
  write_manifest(args.out_dir, "render", args.tracks_csv, 0);
}

}  // namespace pitchtrack::cli
