#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "armrl/checkpoint.hpp"
#include "armrl/harness.hpp"
#include "armrl/plot.hpp"
#include "armrl/rollout.hpp"

namespace fs = std::filesystem;
using namespace armrl;

namespace {

// Relative output paths land under ARMRL_OUT_ROOT when it is set.
std::string apply_out_root(const std::string& path) {
  const char* root = std::getenv("ARMRL_OUT_ROOT");
  if (root == nullptr || path.empty() || fs::path(path).is_absolute()) {
    return path;
  }
  return (fs::path(root) / path).string();
}

int cmd_train(const std::string& config_path, std::int64_t seed_override,
              const std::string& out_override) {
  RunConfig cfg = load_run_config(config_path);
  if (seed_override >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed_override)};
  if (!out_override.empty()) cfg.out_dir = out_override;
  cfg.out_dir = apply_out_root(cfg.out_dir);

  const std::vector<RunOutcome> outcomes = run_training_all_seeds(cfg);
  bool all_ok = true;
  for (const RunOutcome& o : outcomes) {
    if (!o.ok) {
      all_ok = false;
      std::cerr << "seed " << o.seed << " failed: " << o.error << '\n';
      continue;
    }
    std::cout << "seed " << o.seed
              << ": final avg return " << o.summary.final_avg_return
              << " +- " << o.summary.final_std
              << ", max " << o.summary.max_return
              << ", episodes required " << o.summary.episodes_required << '\n'
              << "  curve: " << o.paths.curve_csv << '\n';
  }
  return all_ok ? 0 : 1;
}

int cmd_sweep(const std::string& config_dir, int jobs, std::string out_path) {
  std::vector<SweepEntry> entries;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(config_dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    SweepEntry e;
    e.cfg = load_run_config(file.string());
    e.cfg.out_dir = apply_out_root(e.cfg.out_dir);
    e.source = file.string();
    entries.push_back(std::move(e));
  }
  if (entries.empty()) {
    std::cerr << "sweep: no .json configs in " << config_dir << '\n';
    return 1;
  }
  if (out_path.empty()) out_path = apply_out_root("sweep_summary.csv");

  const SweepResult result = sweep(entries, jobs, out_path);
  std::cout << result.table_csv;
  std::cout << "table: " << out_path << '\n';
  for (const std::string& f : result.failures) {
    std::cerr << "failed: " << f << '\n';
  }
  return result.failures.empty() ? 0 : 1;
}

int cmd_plot(const std::vector<std::string>& runs, const std::string& out) {
  plot_curves(runs, apply_out_root(out));
  std::cout << "wrote " << apply_out_root(out) << '\n';
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, int episodes,
             std::int64_t seed, const std::string& trace_path) {
  const nlohmann::json j = load_json(checkpoint_path);
  const nlohmann::json& env_block = j.at("environment");
  const std::string env_id = env_block.at("id").get<std::string>();

  std::vector<std::string> errors;
  RunConfig cfg;
  cfg.environment = env_id;
  if (env_id == "grasp") {
    merge_from_json(env_block.at("config"), cfg.grasp, "env.", errors);
  } else {
    merge_from_json(env_block.at("config"), cfg.reach, "env.", errors);
  }
  if (!errors.empty()) {
    for (const std::string& e : errors) std::cerr << e << '\n';
    return 1;
  }
  const std::unique_ptr<Env> env = build_env(cfg);

  DeterministicPolicy act;
  const nlohmann::json& model = j.at("model");
  GaussianMlpPolicy policy;
  NafNetwork naf;
  if (model.at("kind") == "gaussian_policy") {
    policy = policy_from_json(model);
    act = [&policy](const Vec& s) { return policy.clamp_action(policy.mean_action(s)); };
  } else {
    auto [online, target] = naf_from_json(model);
    naf = std::move(online);
    const Vec low = env->action_low();
    const Vec high = env->action_high();
    act = [&naf, low, high](const Vec& s) {
      return naf.mu(s).cwiseMax(low).cwiseMin(high);
    };
  }

  Rng rng = substream(static_cast<std::uint64_t>(seed), "eval");
  const EvalStats stats = evaluate_policy(act, *env, episodes, rng);
  std::cout << "episodes: " << episodes << '\n'
            << "mean return: " << stats.mean_return << '\n'
            << "std return: " << stats.std_return << '\n'
            << "success rate: " << stats.success_rate << '\n'
            << "bad terminal rate: " << stats.bad_terminal_rate << '\n'
            << "mean length: " << stats.mean_length << '\n';

  if (!trace_path.empty()) {
    // Record one noise-free episode for plotting.
    GaussianMlpPolicy trace_policy;
    if (model.at("kind") == "gaussian_policy") {
      trace_policy = policy_from_json(model);
      trace_policy.log_std().setConstant(-40.0);  // effectively deterministic
    } else {
      // Wrap the NAF mean in a degenerate Gaussian for the collector.
      Mlp zero_net({env->obs_dim(), env->action_dim()}, Activation::kIdentity);
      trace_policy = GaussianMlpPolicy(zero_net, env->action_low(), env->action_high());
      trace_policy.log_std().setConstant(-40.0);
    }
    const std::unique_ptr<Env> trace_env = env->clone();
    Rng env_rng = substream(static_cast<std::uint64_t>(seed), "trace");
    Rng noise_rng = substream(static_cast<std::uint64_t>(seed), "trace-noise");
    Trajectory traj;
    if (model.at("kind") == "gaussian_policy") {
      traj = collect_trajectory(*trace_env, trace_policy, env_rng, noise_rng);
    } else {
      // Manual rollout with the NAF policy.
      Vec obs = trace_env->reset(env_rng);
      for (int t = 0; t < trace_env->horizon(); ++t) {
        const Vec a = act(obs);
        const StepResult r = trace_env->step(a);
        Transition tr;
        tr.s = obs;
        tr.a_raw = a;
        tr.a_env = a;
        tr.r = r.reward;
        tr.s_next = r.obs;
        tr.terminal = r.info.success || r.info.bad_terminal;
        tr.t = t;
        tr.info = r.info;
        traj.push(std::move(tr));
        if (r.terminal) break;
        obs = r.obs;
      }
    }
    write_trajectory_csv(traj, apply_out_root(trace_path));
    std::cout << "trace: " << apply_out_root(trace_path) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"armrl: policy-optimization toolkit for planar-arm control"};
  app.require_subcommand(1);

  std::string config_path, out_override, config_dir, plot_out, checkpoint_path,
      trace_path, sweep_out;
  std::int64_t seed = -1;
  int jobs = 1;
  int episodes = 10;
  std::vector<std::string> runs;

  CLI::App* train = app.add_subcommand("train", "train one configuration");
  train->add_option("--config", config_path, "run config JSON")->required();
  train->add_option("--seed", seed, "override the config's seed list");
  train->add_option("--out", out_override, "override the output directory");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a directory of configs");
  sweep_cmd->add_option("--config-dir", config_dir, "directory of config JSONs")->required();
  sweep_cmd->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep_out, "comparison table CSV path");

  CLI::App* plot = app.add_subcommand("plot", "plot learning curves");
  plot->add_option("--runs", runs, "curve CSV paths")->required()->expected(-1);
  plot->add_option("--out", plot_out, "output SVG path")->required();

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();
  eval->add_option("--episodes", episodes, "episodes to run")->check(CLI::PositiveNumber);
  eval->add_option("--seed", seed, "evaluation seed");
  eval->add_option("--trace", trace_path, "write one episode trace CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config_path, seed, out_override);
    if (sweep_cmd->parsed()) return cmd_sweep(config_dir, jobs, sweep_out);
    if (plot->parsed()) return cmd_plot(runs, plot_out);
    if (eval->parsed()) {
      return cmd_eval(checkpoint_path, episodes, seed < 0 ? 0 : seed, trace_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
