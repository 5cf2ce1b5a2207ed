#include "armrl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace armrl {

using nlohmann::json;

std::vector<int> parse_architecture(const std::string& s) {
  std::vector<int> hidden;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    if (part.empty()) throw std::invalid_argument("architecture: empty layer in '" + s + "'");
    std::size_t pos = 0;
    const int v = std::stoi(part, &pos);
    if (pos != part.size() || v <= 0) {
      throw std::invalid_argument("architecture: bad layer size '" + part + "'");
    }
    hidden.push_back(v);
  }
  if (hidden.empty()) throw std::invalid_argument("architecture: no layers in '" + s + "'");
  return hidden;
}

std::string architecture_to_string(const std::vector<int>& hidden) {
  std::string s;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(hidden[i]);
  }
  return s;
}

namespace {

// Typed field extraction that records problems instead of throwing, so a
// single pass lists every invalid field.
class Reader {
 public:
  Reader(const json& j, std::string prefix, std::vector<std::string>& errors)
      : j_(j), prefix_(std::move(prefix)), errors_(errors) {
    if (!j_.is_object()) {
      errors_.push_back(prefix_ + ": expected a JSON object");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    known_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const std::exception&) {
      errors_.push_back(prefix_ + key + ": wrong type");
    }
  }

  void get_vec2(const char* key, Vec2& out) {
    known_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    const json& a = j_.at(key);
    if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
      errors_.push_back(prefix_ + key + ": expected [x, y]");
      return;
    }
    out = Vec2(a[0].get<double>(), a[1].get<double>());
  }

  void get_vec3(const char* key, Eigen::Vector3d& out) {
    known_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    const json& a = j_.at(key);
    if (!a.is_array() || a.size() != 3) {
      errors_.push_back(prefix_ + key + ": expected [c1, c2, c3]");
      return;
    }
    for (int i = 0; i < 3; ++i) {
      if (!a[i].is_number()) {
        errors_.push_back(prefix_ + key + ": expected numbers");
        return;
      }
      out[i] = a[i].get<double>();
    }
  }

  const json* object(const char* key) {
    known_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  // Call last: records any key the schema does not know.
  void finish() {
    if (!j_.is_object()) return;
    for (const auto& [key, value] : j_.items()) {
      if (!known_.contains(key)) {
        errors_.push_back(prefix_ + key + ": unknown field");
      }
    }
  }

 private:
  const json& j_;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::set<std::string> known_;
};

json vec2_to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

}  // namespace

void merge_from_json(const json& j, GaeConfig& cfg, const std::string& prefix,
                     std::vector<std::string>& errors) {
  Reader r(j, prefix, errors);
  r.get("gamma", cfg.gamma);
  r.get("lambda", cfg.lambda);
  r.finish();
}

json to_json(const GaeConfig& cfg) {
  return {{"gamma", cfg.gamma}, {"lambda", cfg.lambda}};
}

void merge_from_json(const json& j, ArmParams& cfg, const std::string& prefix,
                     std::vector<std::string>& errors) {
  Reader r(j, prefix, errors);
  r.get_vec2("link_lengths", cfg.link_lengths);
  r.get_vec2("link_masses", cfg.link_masses);
  r.get("gravity", cfg.gravity);
  r.get("joint_damping", cfg.joint_damping);
  r.get("dt", cfg.dt);
  r.get("substeps", cfg.substeps);
  r.finish();
}

json to_json(const ArmParams& cfg) {
  return {{"link_lengths", vec2_to_json(cfg.link_lengths)},
          {"link_masses", vec2_to_json(cfg.link_masses)},
          {"gravity", cfg.gravity},
          {"joint_damping", cfg.joint_damping},
          {"dt", cfg.dt},
          {"substeps", cfg.substeps}};
}

void merge_from_json(const json& j, ReachConfig& cfg, const std::string& prefix,
                     std::vector<std::string>& errors) {
  Reader r(j, prefix, errors);
  if (const json* arm = r.object("arm")) {
    merge_from_json(*arm, cfg.arm, prefix + "arm.", errors);
  }
  r.get("torque_limit", cfg.torque_limit);
  r.get_vec2("goal_center", cfg.goal_center);
  r.get("goal_half_width", cfg.goal_half_width);
  r.get("horizon", cfg.horizon);
  r.get("action_penalty", cfg.action_penalty);
  r.get("success_radius", cfg.success_radius);
  r.get_vec2("q_init", cfg.q_init);
  r.get("init_pos_noise", cfg.init_pos_noise);
  r.get("init_vel_noise", cfg.init_vel_noise);
  r.get("goal_resample_limit", cfg.goal_resample_limit);
  r.finish();
}

json to_json(const ReachConfig& cfg) {
  return {{"arm", to_json(cfg.arm)},
          {"torque_limit", cfg.torque_limit},
          {"goal_center", vec2_to_json(cfg.goal_center)},
          {"goal_half_width", cfg.goal_half_width},
          {"horizon", cfg.horizon},
          {"action_penalty", cfg.action_penalty},
          {"success_radius", cfg.success_radius},
          {"q_init", vec2_to_json(cfg.q_init)},
          {"init_pos_noise", cfg.init_pos_noise},
          {"init_vel_noise", cfg.init_vel_noise},
          {"goal_resample_limit", cfg.goal_resample_limit}};
}

void merge_from_json(const json& j, GraspConfig& cfg, const std::string& prefix,
                     std::vector<std::string>& errors) {
  Reader r(j, prefix, errors);
  if (const json* arm = r.object("arm")) {
    merge_from_json(*arm, cfg.arm, prefix + "arm.", errors);
  }
  r.get("torque_limit", cfg.torque_limit);
  r.get("cyl_radius", cfg.cyl_radius);
  r.get_vec2("cyl_start", cfg.cyl_start);
  r.get("lift_height", cfg.lift_height);
  r.get("horizon", cfg.horizon);
  r.get_vec3("distance_weights", cfg.distance_weights);
  r.get("action_penalty", cfg.action_penalty);
  r.get("bad_terminal_radius", cfg.bad_terminal_radius);
  r.get("success_radius", cfg.success_radius);
  r.get("aperture_rate", cfg.aperture_rate);
  r.get("attach_aperture", cfg.attach_aperture);
  r.get("attach_distance_slack", cfg.attach_distance_slack);
  r.get("finger_base_offset", cfg.finger_base_offset);
  r.get("finger_span", cfg.finger_span);
  r.get_vec2("q_init", cfg.q_init);
  r.get("aperture_init", cfg.aperture_init);
  r.get("init_pos_noise", cfg.init_pos_noise);
  r.get("init_vel_noise", cfg.init_vel_noise);
  r.finish();
}

json to_json(const GraspConfig& cfg) {
  return {{"arm", to_json(cfg.arm)},
          {"torque_limit", cfg.torque_limit},
          {"cyl_radius", cfg.cyl_radius},
          {"cyl_start", vec2_to_json(cfg.cyl_start)},
          {"lift_height", cfg.lift_height},
          {"horizon", cfg.horizon},
          {"distance_weights",
           json::array({cfg.distance_weights[0], cfg.distance_weights[1],
                        cfg.distance_weights[2]})},
          {"action_penalty", cfg.action_penalty},
          {"bad_terminal_radius", cfg.bad_terminal_radius},
          {"success_radius", cfg.success_radius},
          {"aperture_rate", cfg.aperture_rate},
          {"attach_aperture", cfg.attach_aperture},
          {"attach_distance_slack", cfg.attach_distance_slack},
          {"finger_base_offset", cfg.finger_base_offset},
          {"finger_span", cfg.finger_span},
          {"q_init", vec2_to_json(cfg.q_init)},
          {"aperture_init", cfg.aperture_init},
          {"init_pos_noise", cfg.init_pos_noise},
          {"init_vel_noise", cfg.init_vel_noise}};
}

void merge_from_json(const json& j, VpgConfig& cfg, const std::string& prefix,
                     std::vector<std::string>& errors) {
  Reader r(j, prefix, errors);
  r.get("batch_timesteps", cfg.batch_timesteps);
  r.get("learning_rate", cfg.learning_rate);
  if (const json* gae = r.object("gae")) {
    merge_from_json(*gae, cfg.gae, prefix + "gae.", errors);
  }
  r.get("use_baseline", cfg.use_baseline);
  r.get("baseline_hidden", cfg.baseline_hidden);
  r.get("baseline_delta", cfg.baseline_delta);
  r.get("baseline_cg_iterations", cfg.baseline_cg_iterations);
  r.finish();
}

json to_json(const VpgConfig& cfg) {
  return {{"batch_timesteps", cfg.batch_timesteps},
          {"learning_rate", cfg.learning_rate},
          {"gae", to_json(cfg.gae)},
          {"use_baseline", cfg.use_baseline},
          {"baseline_hidden", cfg.baseline_hidden},
          {"baseline_delta", cfg.baseline_delta},
          {"baseline_cg_iterations", cfg.baseline_cg_iterations}};
}

void merge_from_json(const json& j, TrpoConfig& cfg, const std::string& prefix,
                     std::vector<std::string>& errors) {
  Reader r(j, prefix, errors);
  r.get("delta_d", cfg.delta_d);
  r.get("delta_v", cfg.delta_v);
  r.get("cg_iterations", cfg.cg_iterations);
  r.get("cg_damping", cfg.cg_damping);
  r.get("backtrack_coeff", cfg.backtrack_coeff);
  r.get("max_backtracks", cfg.max_backtracks);
  r.get("batch_timesteps", cfg.batch_timesteps);
  if (const json* gae = r.object("gae")) {
    merge_from_json(*gae, cfg.gae, prefix + "gae.", errors);
  }
  r.get("baseline_hidden", cfg.baseline_hidden);
  r.get("baseline_damping", cfg.baseline_damping);
  r.get("fit_baseline_first", cfg.fit_baseline_first);
  r.get("discounted_state_weighting", cfg.discounted_state_weighting);
  r.finish();
}

json to_json(const TrpoConfig& cfg) {
  return {{"delta_d", cfg.delta_d},
          {"delta_v", cfg.delta_v},
          {"cg_iterations", cfg.cg_iterations},
          {"cg_damping", cfg.cg_damping},
          {"backtrack_coeff", cfg.backtrack_coeff},
          {"max_backtracks", cfg.max_backtracks},
          {"batch_timesteps", cfg.batch_timesteps},
          {"gae", to_json(cfg.gae)},
          {"baseline_hidden", cfg.baseline_hidden},
          {"baseline_damping", cfg.baseline_damping},
          {"fit_baseline_first", cfg.fit_baseline_first},
          {"discounted_state_weighting", cfg.discounted_state_weighting}};
}

void merge_from_json(const json& j, NafConfig& cfg, const std::string& prefix,
                     std::vector<std::string>& errors) {
  Reader r(j, prefix, errors);
  r.get("hidden_sizes", cfg.hidden_sizes);
  r.get("minibatch_size", cfg.minibatch_size);
  r.get("critic_fits_per_step", cfg.critic_fits_per_step);
  r.get("soft_update_coeff", cfg.soft_update_coeff);
  r.get("reward_scale", cfg.reward_scale);
  r.get("gamma", cfg.gamma);
  r.get("learning_rate", cfg.learning_rate);
  r.get("buffer_capacity", cfg.buffer_capacity);
  r.get("warmup_transitions", cfg.warmup_transitions);
  r.get("noise_start_frac", cfg.noise_start_frac);
  r.get("noise_end", cfg.noise_end);
  r.get("noise_decay_episodes", cfg.noise_decay_episodes);
  r.finish();
}

json to_json(const NafConfig& cfg) {
  return {{"hidden_sizes", cfg.hidden_sizes},
          {"minibatch_size", cfg.minibatch_size},
          {"critic_fits_per_step", cfg.critic_fits_per_step},
          {"soft_update_coeff", cfg.soft_update_coeff},
          {"reward_scale", cfg.reward_scale},
          {"gamma", cfg.gamma},
          {"learning_rate", cfg.learning_rate},
          {"buffer_capacity", cfg.buffer_capacity},
          {"warmup_transitions", cfg.warmup_transitions},
          {"noise_start_frac", cfg.noise_start_frac},
          {"noise_end", cfg.noise_end},
          {"noise_decay_episodes", cfg.noise_decay_episodes}};
}

std::int64_t RunConfig::resolved_max_episodes() const {
  if (max_episodes >= 0) return max_episodes;
  return environment == "grasp" ? 5000 : 4000;
}

int RunConfig::resolved_eval_every() const {
  if (eval_every >= 1) return eval_every;
  return algorithm == "dqn_naf" ? 10 : 1;
}

RunConfig run_config_from_json(const json& j, std::vector<std::string>& errors) {
  RunConfig cfg;
  Reader r(j, "", errors);
  r.get("algorithm", cfg.algorithm);
  r.get("environment", cfg.environment);
  r.get("architecture", cfg.architecture);
  r.get("seeds", cfg.seeds);
  r.get("max_episodes", cfg.max_episodes);
  r.get("eval_every", cfg.eval_every);
  r.get("eval_episodes", cfg.eval_episodes);
  r.get("out_dir", cfg.out_dir);
  if (const json* env = r.object("env")) {
    if (cfg.environment == "grasp") {
      merge_from_json(*env, cfg.grasp, "env.", errors);
    } else {
      merge_from_json(*env, cfg.reach, "env.", errors);
    }
  }
  if (const json* a = r.object("vpg")) merge_from_json(*a, cfg.vpg, "vpg.", errors);
  if (const json* a = r.object("trpo")) merge_from_json(*a, cfg.trpo, "trpo.", errors);
  if (const json* a = r.object("naf")) merge_from_json(*a, cfg.naf, "naf.", errors);
  r.finish();
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["algorithm"] = cfg.algorithm;
  j["environment"] = cfg.environment;
  j["architecture"] = cfg.architecture;
  j["seeds"] = cfg.seeds;
  j["max_episodes"] = cfg.max_episodes;
  j["eval_every"] = cfg.eval_every;
  j["eval_episodes"] = cfg.eval_episodes;
  j["out_dir"] = cfg.out_dir;
  j["env"] = cfg.environment == "grasp" ? to_json(cfg.grasp) : to_json(cfg.reach);
  j["vpg"] = to_json(cfg.vpg);
  j["trpo"] = to_json(cfg.trpo);
  j["naf"] = to_json(cfg.naf);
  return j;
}

std::vector<std::string> validate_run_config(const RunConfig& cfg) {
  std::vector<std::string> errors;
  if (cfg.algorithm != "vpg" && cfg.algorithm != "trpo" && cfg.algorithm != "dqn_naf") {
    errors.push_back("algorithm: must be one of vpg, trpo, dqn_naf");
  }
  if (cfg.environment != "reach" && cfg.environment != "grasp") {
    errors.push_back("environment: must be reach or grasp");
  }
  try {
    parse_architecture(cfg.architecture);
  } catch (const std::exception& e) {
    errors.push_back(std::string("architecture: ") + e.what());
  }
  if (cfg.seeds.empty()) errors.push_back("seeds: must list at least one seed");
  if (cfg.eval_episodes < 1) errors.push_back("eval_episodes: must be >= 1");
  if (cfg.out_dir.empty()) errors.push_back("out_dir: must be non-empty");

  const int horizon =
      cfg.environment == "grasp" ? cfg.grasp.horizon : cfg.reach.horizon;
  try {
    if (cfg.environment == "grasp") {
      cfg.grasp.validate();
    } else {
      cfg.reach.validate();
    }
  } catch (const std::exception& e) {
    errors.push_back(std::string("env: ") + e.what());
  }
  try {
    if (cfg.algorithm == "vpg") cfg.vpg.validate(horizon);
    if (cfg.algorithm == "trpo") cfg.trpo.validate();
    if (cfg.algorithm == "dqn_naf") cfg.naf.validate();
  } catch (const std::exception& e) {
    errors.push_back(cfg.algorithm + ": " + e.what());
  }
  return errors;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_run_config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("load_run_config: " + path + ": " + e.what());
  }
  std::vector<std::string> errors;
  RunConfig cfg = run_config_from_json(j, errors);
  const std::vector<std::string> semantic = validate_run_config(cfg);
  errors.insert(errors.end(), semantic.begin(), semantic.end());
  if (!errors.empty()) {
    std::string msg = "invalid config " + path + ":";
    for (const std::string& e : errors) msg += "\n  - " + e;
    throw std::runtime_error(msg);
  }
  return cfg;
}

}  // namespace armrl
