#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "armrl/grasp_env.hpp"
#include "armrl/naf.hpp"
#include "armrl/reach_env.hpp"
#include "armrl/trpo.hpp"
#include "armrl/vpg.hpp"

namespace armrl {

// "100x100" -> {100, 100}. The four sweep presets are 32x32, 100x100,
// 150x100x50 and 400x300; any positive AxB... string is accepted.
std::vector<int> parse_architecture(const std::string& s);
std::string architecture_to_string(const std::vector<int>& hidden);

// Full description of one training run. Loaded from a JSON file; absent keys
// keep their defaults, unknown keys are validation errors.
struct RunConfig {
  std::string algorithm = "trpo";    // vpg | trpo | dqn_naf
  std::string environment = "reach"; // reach | grasp
  std::string architecture = "100x100";
  std::vector<std::uint64_t> seeds{0};
  // < 0 means the per-task default: 4000 (reach), 5000 (grasp).
  std::int64_t max_episodes = -1;
  // Evaluation cadence: every N policy updates (vpg/trpo) or every N episodes
  // (dqn_naf; < 0 means the dqn_naf default of 10).
  int eval_every = -1;
  int eval_episodes = 10;
  std::string out_dir = "runs/run";

  ReachConfig reach;
  GraspConfig grasp;
  VpgConfig vpg;
  TrpoConfig trpo;
  NafConfig naf;

  std::int64_t resolved_max_episodes() const;
  int resolved_eval_every() const;
};

// Merge-style parse: j updates cfg field by field. Unknown keys and malformed
// values are appended to `errors` (path-qualified), never thrown, so one pass
// reports every invalid field.
RunConfig run_config_from_json(const nlohmann::json& j,
                               std::vector<std::string>& errors);
nlohmann::json run_config_to_json(const RunConfig& cfg);

// Semantic validation (ranges, cross-field constraints). Returns one message
// per invalid field; empty means the config is runnable.
std::vector<std::string> validate_run_config(const RunConfig& cfg);

// Load + parse + validate; throws with every collected error joined when the
// file is not a runnable config.
RunConfig load_run_config(const std::string& path);

// Component (de)serializers, merge semantics like run_config_from_json.
void merge_from_json(const nlohmann::json& j, GaeConfig& cfg,
                     const std::string& prefix, std::vector<std::string>& errors);
void merge_from_json(const nlohmann::json& j, ArmParams& cfg,
                     const std::string& prefix, std::vector<std::string>& errors);
void merge_from_json(const nlohmann::json& j, ReachConfig& cfg,
                     const std::string& prefix, std::vector<std::string>& errors);
void merge_from_json(const nlohmann::json& j, GraspConfig& cfg,
                     const std::string& prefix, std::vector<std::string>& errors);
void merge_from_json(const nlohmann::json& j, VpgConfig& cfg,
                     const std::string& prefix, std::vector<std::string>& errors);
void merge_from_json(const nlohmann::json& j, TrpoConfig& cfg,
                     const std::string& prefix, std::vector<std::string>& errors);
void merge_from_json(const nlohmann::json& j, NafConfig& cfg,
                     const std::string& prefix, std::vector<std::string>& errors);

nlohmann::json to_json(const GaeConfig& cfg);
nlohmann::json to_json(const ArmParams& cfg);
nlohmann::json to_json(const ReachConfig& cfg);
nlohmann::json to_json(const GraspConfig& cfg);
nlohmann::json to_json(const VpgConfig& cfg);
nlohmann::json to_json(const TrpoConfig& cfg);
nlohmann::json to_json(const NafConfig& cfg);

}  // namespace armrl
