/**
 * @file pitchtrack_main.cpp
 * @brief Command-line front end: generate / train / track / eval / render.
 */

#include <CLI11.hpp>
#include <iostream>

#include "pitchtrack/commands.hpp"
#include "pitchtrack/errors.hpp"

namespace {

// Structured exit codes: 2 config, 3 io, 4 shape/grid, 1 anything else.
int run(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const pitchtrack::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pitchtrack::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const pitchtrack::EmptyDataset& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const pitchtrack::ShapeMismatch& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return 4;
  } catch (const pitchtrack::GridMismatch& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return 4;
  } catch (const pitchtrack::FrameRangeMismatch& e) {
    std::cerr << "eval error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pitchtrack::cli;

  CLI::App app{"pitchtrack: multi-camera bird's-eye player tracking"};
  app.require_subcommand(1);

  // generate --------------------------------------------------------------
  GenerateArgs gen;
  std::uint64_t seed_value = 0;
  int episodes_value = 0;
  auto* generate = app.add_subcommand("generate", "synthesize a dataset");
  generate->add_option("--config", gen.config_path, "scenario config file")->required();
  generate->add_option("--out", gen.out_dir, "output dataset directory")->required();
  auto* gen_seed = generate->add_option("--seed", seed_value, "base seed");
  auto* gen_eps = generate->add_option("--episodes", episodes_value, "episode count");

  // train -----------------------------------------------------------------
  TrainArgs trn;
  std::string trn_config, trn_resume, trn_ablation, trn_encoder;
  std::uint64_t trn_seed = 0;
  int trn_episodes = 0, trn_epochs = 0;
  auto* train = app.add_subcommand("train", "train the tracking network");
  train->add_option("--dataset", trn.dataset_dir, "generated dataset directory")->required();
  train->add_option("--out", trn.out_dir, "output directory")->required();
  auto* trn_cfg_opt = train->add_option("--config", trn_config, "override config");
  auto* trn_resume_opt = train->add_option("--resume", trn_resume, "checkpoint to continue from");
  auto* trn_seed_opt = train->add_option("--seed", trn_seed, "init seed");
  auto* trn_eps_opt = train->add_option("--episodes", trn_episodes, "use first N episodes");
  auto* trn_epochs_opt = train->add_option("--epochs", trn_epochs, "training epochs");
  auto* trn_abl_opt = train->add_option("--ablation", trn_ablation,
                                        "no-trajectory | no-message-passing");
  auto* trn_enc_opt = train->add_option("--encoder", trn_encoder,
                                        "mlp|mixed1|mixed2|coordconv|conv");

  // track -----------------------------------------------------------------
  TrackArgs trk;
  std::string trk_config, trk_ablation, trk_encoder;
  std::uint64_t trk_seed = 0;
  int trk_episodes = 0;
  auto* track = app.add_subcommand("track", "run a tracker over a dataset");
  track->add_option("--dataset", trk.dataset_dir, "generated dataset directory")->required();
  track->add_option("--out", trk.out_dir, "output directory")->required();
  track->add_option("--checkpoint", trk.checkpoint, "PTNN checkpoint");
  track->add_flag("--baseline", trk.baseline, "use the particle-filter baseline");
  auto* trk_cfg_opt = track->add_option("--config", trk_config, "override config");
  auto* trk_seed_opt = track->add_option("--seed", trk_seed, "baseline rng seed");
  auto* trk_eps_opt = track->add_option("--episodes", trk_episodes, "track first N episodes");
  auto* trk_abl_opt = track->add_option("--ablation", trk_ablation,
                                        "no-trajectory | no-message-passing");
  auto* trk_enc_opt = track->add_option("--encoder", trk_encoder,
                                        "mlp|mixed1|mixed2|coordconv|conv");

  // eval ------------------------------------------------------------------
  EvalArgs evl;
  std::string evl_out;
  auto* eval = app.add_subcommand("eval", "CLEAR-MOT report for tracks vs ground truth");
  eval->add_option("--gt", evl.gt_path, "gt csv file or dataset directory")->required();
  eval->add_option("--hyp", evl.hyp_path, "hypothesis csv file or directory")->required();
  auto* evl_out_opt = eval->add_option("--out", evl_out, "report output directory");

  // render ----------------------------------------------------------------
  RenderArgs rnd;
  auto* render = app.add_subcommand("render", "render frames with track trails");
  render->add_option("--episode", rnd.episode_dir, "dataset episode directory")->required();
  render->add_option("--tracks", rnd.tracks_csv, "track csv to overlay")->required();
  render->add_option("--out", rnd.out_dir, "output image directory")->required();
  render->add_option("--from", rnd.frame_begin, "first frame");
  render->add_option("--to", rnd.frame_end, "last frame (inclusive)");

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) {
    if (*gen_seed) gen.seed = seed_value;
    if (*gen_eps) gen.episodes = episodes_value;
    return run([&] { cmd_generate(gen); });
  }
  if (train->parsed()) {
    if (*trn_cfg_opt) trn.config_path = trn_config;
    if (*trn_resume_opt) trn.resume_checkpoint = trn_resume;
    if (*trn_seed_opt) trn.seed = trn_seed;
    if (*trn_eps_opt) trn.episodes = trn_episodes;
    if (*trn_epochs_opt) trn.epochs = trn_epochs;
    if (*trn_abl_opt) trn.overrides.ablation = trn_ablation;
    if (*trn_enc_opt) trn.overrides.encoder = trn_encoder;
    return run([&] { cmd_train(trn); });
  }
  if (track->parsed()) {
    if (*trk_cfg_opt) trk.config_path = trk_config;
    if (*trk_seed_opt) trk.seed = trk_seed;
    if (*trk_eps_opt) trk.episodes = trk_episodes;
    if (*trk_abl_opt) trk.overrides.ablation = trk_ablation;
    if (*trk_enc_opt) trk.overrides.encoder = trk_encoder;
    return run([&] { cmd_track(trk); });
  }
  if (eval->parsed()) {
    if (*evl_out_opt) evl.out_dir = evl_out;
    return run([&] { cmd_eval(evl); });
  }
  if (render->parsed()) return run([&] { cmd_render(rnd); });
  return 1;
}
