#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pitchtrack/config.hpp"

// Command layer behind the CLI binary. Every command is a deterministic
// function of (config, seed) and writes a manifest into its output
// directory.

namespace pitchtrack::cli {

struct TrackerOverrides {
  std::optional<std::string> ablation;  // "no-trajectory" | "no-message-passing"
  std::optional<std::string> encoder;   // mlp|mixed1|mixed2|coordconv|conv

  void apply(TrackerConfig& cfg) const;
};

struct GenerateArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
};

// Dataset layout: out/manifest.txt, out/scenario.cfg, and per episode
// out/episode_XXX/{gt.csv, frame_XXXXXX.pthm}.
void cmd_generate(const GenerateArgs& args);

struct TrainArgs {
  std::string dataset_dir;
  std::string out_dir;
  std::optional<std::string> config_path;  // defaults to dataset scenario.cfg
  std::optional<std::string> resume_checkpoint;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;  // train on the first N episodes
  std::optional<int> epochs;
  TrackerOverrides overrides;
};

// Writes out/checkpoint.ptnn, out/loss.csv and a manifest.
void cmd_train(const TrainArgs& args);

struct TrackArgs {
  std::string dataset_dir;
  std::string out_dir;
  std::string checkpoint;  // ignored with baseline = true
  bool baseline = false;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;  // baseline rng seed
  std::optional<int> episodes;
  TrackerOverrides overrides;
};

// Writes one hypothesis CSV per episode: out/episode_XXX.csv.
void cmd_track(const TrackArgs& args);

struct EvalArgs {
  std::string gt_path;   // csv file, dataset dir, or directory of gt csvs
  std::string hyp_path;  // csv file or directory of episode_XXX.csv
  std::optional<std::string> out_dir;
};

// Prints the report; with out_dir also writes report.txt and report.kv.
// Multi-episode inputs report per-episode, pooled and mean-MOTA numbers.
void cmd_eval(const EvalArgs& args);

struct RenderArgs {
  std::string episode_dir;  // dataset episode directory with PTHM frames
  std::string tracks_csv;
  std::string out_dir;
  int frame_begin = 0;
  int frame_end = -1;  // inclusive; -1 = last available
};

void cmd_render(const RenderArgs& args);

// Helpers shared by tests and commands.
std::vector<std::string> episode_dirs(const std::string& dataset_dir);
void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::string& config_path, std::uint64_t seed);

}  // namespace pitchtrack::cli
