#include "pitchtrack/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace pitchtrack {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigInvalid("key '" + key + "': '" + v + "' is not a number");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigInvalid("key '" + key + "': '" + v + "' is not an integer");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigInvalid("key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v,
                               std::size_t expect) {
  std::istringstream is(v);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double(key, tok));
  if (out.size() != expect)
    throw ConfigInvalid("key '" + key + "' expects " + std::to_string(expect) +
                        " numbers, got " + std::to_string(out.size()));
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigInvalid(origin + ":" + std::to_string(lineno) +
                          ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigInvalid(origin + ":" + std::to_string(lineno) + ": empty key or value");
    if (!kv.emplace(key, value).second)
      throw ConfigInvalid(origin + ": duplicate key '" + key + "'");
  }

  RunConfig c;
  std::map<int, Homography> cam_hs;
  std::map<int, int> cam_offsets;
  for (const auto& [key, value] : kv) {
    auto& s = c.scenario;
    auto& t = c.tracker;
    auto& tr = c.train;
    if (key == "n_agents") s.n_agents = to_int(key, value);
    else if (key == "n_cameras") s.n_cameras = to_int(key, value);
    else if (key == "n_frames") s.n_frames = to_int(key, value);
    else if (key == "n_episodes") c.n_episodes = to_int(key, value);
    else if (key == "dt") s.dt = to_double(key, value);
    else if (key == "pitch_length") s.pitch_length = to_double(key, value);
    else if (key == "pitch_width") s.pitch_width = to_double(key, value);
    else if (key == "resolution") s.resolution = to_double(key, value);
    else if (key == "seed") s.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "cluster_attraction") s.cluster_attraction = to_double(key, value);
    else if (key == "miss_rate") s.miss_rate = to_double(key, value);
    else if (key == "blob_sigma") s.blob_sigma = to_double(key, value);
    else if (key == "pos_noise_sigma") s.pos_noise_sigma = to_double(key, value);
    else if (key == "occlusion_dist") s.occlusion_dist = to_double(key, value);
    else if (key == "calib_bias_max") s.calib_bias_max = to_double(key, value);
    else if (key == "max_speed") s.max_speed = to_double(key, value);
    else if (key == "radius") t.radius = to_double(key, value);
    else if (key == "rounds") t.rounds = to_int(key, value);
    else if (key == "crop_side") t.crop_side = to_int(key, value);
    else if (key == "crop_downsample") t.crop_downsample = to_int(key, value);
    else if (key == "terminate_after") t.terminate_after = to_int(key, value);
    else if (key == "init_threshold")
      t.init_threshold = static_cast<float>(to_double(key, value));
    else if (key == "init_min_dist") t.init_min_dist = to_double(key, value);
    else if (key == "miss_radius") t.miss_radius = to_double(key, value);
    else if (key == "max_step") t.max_step = to_double(key, value);
    else if (key == "use_trajectory") t.use_trajectory = to_bool(key, value);
    else if (key == "use_message_passing") t.use_message_passing = to_bool(key, value);
    else if (key == "detection_encoder") t.encoder = encoder_kind_from_string(value);
    else if (key == "epochs") tr.epochs = to_int(key, value);
    else if (key == "lr") tr.lr = to_double(key, value);
    else if (key == "window") tr.window = to_int(key, value);
    else if (key == "warmup_frames") tr.warmup_frames = to_int(key, value);
    else if (key == "center_jitter") tr.center_jitter = to_double(key, value);
    else if (key == "jitter_rho") tr.jitter_rho = to_double(key, value);
    else if (key == "self_anchor") tr.self_anchor = to_bool(key, value);
    else if (key == "train_seed") tr.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key.rfind("camera", 0) == 0 && key.size() > 6) {
      // cameraN_homography: 9 row-major numbers; cameraN_offset: frames.
      const auto underscore = key.find('_');
      if (underscore == std::string::npos)
        throw ConfigInvalid("unknown key '" + key + "'");
      int index = 0;
      try {
        index = std::stoi(key.substr(6, underscore - 6));
      } catch (const std::exception&) {
        throw ConfigInvalid("unknown key '" + key + "'");
      }
      const std::string field = key.substr(underscore + 1);
      if (field == "homography") {
        const auto v = to_doubles(key, value, 9);
        Eigen::Matrix3d m;
        m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
        cam_hs[index] = Homography::from_matrix(m);
      } else if (field == "offset") {
        cam_offsets[index] = to_int(key, value);
      } else {
        throw ConfigInvalid("unknown key '" + key + "'");
      }
    } else {
      throw ConfigInvalid("unknown key '" + key + "'");
    }
  }

  if (!cam_hs.empty()) {
    c.scenario.camera_homographies.resize(c.scenario.n_cameras);
    const auto defaults = sim::default_camera_homographies(c.scenario.pitch_length,
                                                           c.scenario.pitch_width);
    for (int i = 0; i < c.scenario.n_cameras; ++i)
      c.scenario.camera_homographies[i] = defaults[i % defaults.size()];
    for (const auto& [i, h] : cam_hs) {
      if (i < 0 || i >= c.scenario.n_cameras)
        throw ConfigInvalid("camera index " + std::to_string(i) + " out of range");
      c.scenario.camera_homographies[i] = h;
    }
  }
  if (!cam_offsets.empty()) {
    c.scenario.camera_frame_offsets.assign(c.scenario.n_cameras, 0);
    for (const auto& [i, off] : cam_offsets) {
      if (i < 0 || i >= c.scenario.n_cameras)
        throw ConfigInvalid("camera index " + std::to_string(i) + " out of range");
      c.scenario.camera_frame_offsets[i] = off;
    }
  }

  if (c.n_episodes <= 0) throw ConfigInvalid("n_episodes must be positive");
  c.scenario.validate();
  if (c.tracker.crop_side <= 0 || c.tracker.crop_side % 2 == 0)
    throw ConfigInvalid("crop_side must be odd and positive");
  if (c.tracker.crop_downsample <= 0 ||
      c.tracker.crop_downsample > c.tracker.crop_side)
    throw ConfigInvalid("crop_downsample must lie in (0, crop_side]");
  if (c.train.window < 1) throw ConfigInvalid("window must be >= 1");
  if (c.train.epochs < 0) throw ConfigInvalid("epochs must be >= 0");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_run_config(buf.str(), path);
}

std::string run_config_text(const RunConfig& c) {
  std::ostringstream os;
  char num[64];
  auto put = [&](const char* key, double v) {
    std::snprintf(num, sizeof(num), "%.10g", v);
    os << key << " = " << num << "\n";
  };
  const auto& s = c.scenario;
  os << "n_agents = " << s.n_agents << "\n";
  os << "n_cameras = " << s.n_cameras << "\n";
  os << "n_frames = " << s.n_frames << "\n";
  os << "n_episodes = " << c.n_episodes << "\n";
  put("dt", s.dt);
  put("pitch_length", s.pitch_length);
  put("pitch_width", s.pitch_width);
  put("resolution", s.resolution);
  os << "seed = " << s.seed << "\n";
  put("cluster_attraction", s.cluster_attraction);
  put("miss_rate", s.miss_rate);
  put("blob_sigma", s.blob_sigma);
  put("pos_noise_sigma", s.pos_noise_sigma);
  put("occlusion_dist", s.occlusion_dist);
  put("calib_bias_max", s.calib_bias_max);
  put("max_speed", s.max_speed);
  for (std::size_t i = 0; i < s.camera_homographies.size(); ++i) {
    os << "camera" << i << "_homography =";
    const auto& m = s.camera_homographies[i].m;
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) {
        std::snprintf(num, sizeof(num), " %.17g", m(r, col));
        os << num;
      }
    os << "\n";
  }
  for (std::size_t i = 0; i < s.camera_frame_offsets.size(); ++i)
    os << "camera" << i << "_offset = " << s.camera_frame_offsets[i] << "\n";

  const auto& t = c.tracker;
  put("radius", t.radius);
  os << "rounds = " << t.rounds << "\n";
  os << "crop_side = " << t.crop_side << "\n";
  os << "crop_downsample = " << t.crop_downsample << "\n";
  os << "terminate_after = " << t.terminate_after << "\n";
  put("init_threshold", t.init_threshold);
  put("init_min_dist", t.init_min_dist);
  put("miss_radius", t.miss_radius);
  put("max_step", t.max_step);
  os << "use_trajectory = " << (t.use_trajectory ? "true" : "false") << "\n";
  os << "use_message_passing = " << (t.use_message_passing ? "true" : "false") << "\n";
  os << "detection_encoder = " << to_string(t.encoder) << "\n";

  const auto& tr = c.train;
  os << "epochs = " << tr.epochs << "\n";
  put("lr", tr.lr);
  os << "window = " << tr.window << "\n";
  os << "warmup_frames = " << tr.warmup_frames << "\n";
  put("center_jitter", tr.center_jitter);
  put("jitter_rho", tr.jitter_rho);
  os << "self_anchor = " << (tr.self_anchor ? "true" : "false") << "\n";
  os << "train_seed = " << tr.seed << "\n";
  return os.str();
}

void save_run_config(const std::string& path, const RunConfig& c) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << run_config_text(c);
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace pitchtrack
