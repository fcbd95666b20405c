#pragma once

#include <string>

#include "pitchtrack/simworld.hpp"
#include "pitchtrack/tracker.hpp"
#include "pitchtrack/train.hpp"

namespace pitchtrack {

// Everything a run needs, parsed from one plain-text `key = value` file.
// Unknown keys are hard errors so ablation-switch typos cannot pass silently.
struct RunConfig {
  sim::ScenarioConfig scenario;
  TrackerConfig tracker;
  TrainConfig train;
  int n_episodes = 1;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text, const std::string& origin);

// Serializes a resolved config; load(save(c)) reproduces c.
std::string run_config_text(const RunConfig& c);
void save_run_config(const std::string& path, const RunConfig& c);

}  // namespace pitchtrack
