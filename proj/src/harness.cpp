#include "armrl/harness.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "armrl/checkpoint.hpp"
#include "armrl/csv.hpp"
#include "armrl/naf.hpp"
#include "armrl/rollout.hpp"
#include "armrl/trpo.hpp"
#include "armrl/vpg.hpp"

namespace armrl {

namespace fs = std::filesystem;
using nlohmann::json;

std::unique_ptr<Env> build_env(const RunConfig& cfg) {
  if (cfg.environment == "grasp") return std::make_unique<GraspEnv>(cfg.grasp);
  return std::make_unique<ReachEnv>(cfg.reach);
}

std::string curve_row_to_csv(const CurveRow& row) {
  std::string line = std::to_string(row.iteration);
  line += ',' + std::to_string(row.total_episodes);
  line += ',' + std::to_string(row.total_timesteps);
  line += ',' + csv::format(row.mean_return);
  line += ',' + csv::format(row.std_return);
  line += ',' + csv::format(row.kl);
  line += ',' + csv::format(row.surrogate_improvement);
  return line;
}

std::vector<CurveRow> load_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_curve_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_curve_csv: empty file " + path);
  }
  if (line != kCurveCsvHeader) {
    throw std::runtime_error("load_curve_csv: unexpected header in " + path);
  }
  std::vector<CurveRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = csv::split_line(line);
    if (fields.size() != 7) {
      throw std::runtime_error("load_curve_csv: malformed row in " + path);
    }
    CurveRow row;
    row.iteration = std::stoll(fields[0]);
    row.total_episodes = std::stoll(fields[1]);
    row.total_timesteps = std::stoll(fields[2]);
    row.mean_return = std::stod(fields[3]);
    row.std_return = std::stod(fields[4]);
    row.kl = std::stod(fields[5]);
    row.surrogate_improvement = std::stod(fields[6]);
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw std::runtime_error("load_curve_csv: no data rows in " + path);
  }
  return rows;
}

namespace {

json environment_block(const RunConfig& cfg) {
  json j;
  j["id"] = cfg.environment;
  j["config"] = cfg.environment == "grasp" ? to_json(cfg.grasp) : to_json(cfg.reach);
  return j;
}

class CurveWriter {
 public:
  explicit CurveWriter(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path);
    out_ << kCurveCsvHeader << '\n';
    out_.flush();
  }
  void write(const CurveRow& row) {
    out_ << curve_row_to_csv(row) << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

// Shared best-checkpoint bookkeeping across the algorithm loops.
class BestCheckpoint {
 public:
  BestCheckpoint(std::string path, json env_block, std::string algorithm)
      : path_(std::move(path)),
        env_block_(std::move(env_block)),
        algorithm_(std::move(algorithm)) {}

  void offer(double mean_return, const json& model) {
    if (have_best_ && mean_return <= best_) return;
    best_ = mean_return;
    have_best_ = true;
    json j;
    j["format"] = "armrl-checkpoint-v1";
    j["algorithm"] = algorithm_;
    j["environment"] = env_block_;
    j["mean_return"] = mean_return;
    j["model"] = model;
    save_json(j, path_);
  }

 private:
  std::string path_;
  json env_block_;
  std::string algorithm_;
  double best_ = 0.0;
  bool have_best_ = false;
};

void train_on_policy(const RunConfig& cfg, std::uint64_t seed,
                     CurveWriter& writer, BestCheckpoint& best,
                     std::vector<CurveRow>& curve) {
  const std::unique_ptr<Env> env = build_env(cfg);
  const std::vector<int> hidden = parse_architecture(cfg.architecture);

  std::vector<int> policy_sizes;
  policy_sizes.push_back(env->obs_dim());
  policy_sizes.insert(policy_sizes.end(), hidden.begin(), hidden.end());
  policy_sizes.push_back(env->action_dim());
  Mlp mean_net(policy_sizes, Activation::kTanh);
  Rng init_rng = substream(seed, "policy-init");
  mean_net.init_params(init_rng, 0.01);
  GaussianMlpPolicy policy(std::move(mean_net), env->action_low(), env->action_high());

  const std::vector<int>& baseline_hidden = cfg.algorithm == "vpg"
                                                ? cfg.vpg.baseline_hidden
                                                : cfg.trpo.baseline_hidden;
  std::vector<int> value_sizes;
  value_sizes.push_back(env->obs_dim());
  value_sizes.insert(value_sizes.end(), baseline_hidden.begin(), baseline_hidden.end());
  value_sizes.push_back(1);
  Mlp value_net(value_sizes, Activation::kRelu);
  Rng baseline_rng = substream(seed, "baseline-init");
  value_net.init_params(baseline_rng);

  AdamState adam(policy.num_params(),
                 cfg.algorithm == "vpg" ? cfg.vpg.learning_rate : 1e-3);

  const std::int64_t max_episodes = cfg.resolved_max_episodes();
  const int eval_every = cfg.resolved_eval_every();
  const int episodes_per_iter =
      cfg.algorithm == "vpg" ? cfg.vpg.episodes_per_iteration(env->horizon())
                             : cfg.trpo.episodes_per_iteration(env->horizon());

  std::int64_t episodes = 0;
  std::int64_t timesteps = 0;
  std::int64_t iteration = 0;

  const auto evaluate = [&](double kl, double surrogate) {
    const DeterministicPolicy act = [&](const Vec& s) {
      return policy.clamp_action(policy.mean_action(s));
    };
    Rng eval_rng = substream(seed, "eval", static_cast<std::uint64_t>(iteration));
    const EvalStats stats =
        evaluate_policy(act, *env, cfg.eval_episodes, eval_rng);
    CurveRow row;
    row.iteration = iteration;
    row.total_episodes = episodes;
    row.total_timesteps = timesteps;
    row.mean_return = stats.mean_return;
    row.std_return = stats.std_return;
    row.kl = kl;
    row.surrogate_improvement = surrogate;
    row.success_rate = stats.success_rate;
    curve.push_back(row);
    writer.write(row);
    best.offer(stats.mean_return, policy_to_json(policy));
  };

  const double nan = std::numeric_limits<double>::quiet_NaN();
  evaluate(nan, nan);  // initial policy

  while (episodes < max_episodes) {
    iteration += 1;
    const std::vector<Trajectory> trajs =
        collect_episodes(*env, policy, episodes_per_iter, seed, episodes);
    episodes += static_cast<std::int64_t>(trajs.size());
    for (const Trajectory& traj : trajs) timesteps += traj.length();

    double kl = nan;
    double surrogate = nan;
    if (cfg.algorithm == "trpo") {
      const TrpoStepResult step = trpo_step(policy, trajs, value_net, cfg.trpo);
      kl = step.kl;
      surrogate = step.surrogate_improvement;
    } else {
      vpg_update(policy, trajs, cfg.vpg, adam,
                 cfg.vpg.use_baseline ? &value_net : nullptr);
    }

    if (iteration % eval_every == 0 || episodes >= max_episodes) {
      evaluate(kl, surrogate);
    }
  }
}

void train_naf(const RunConfig& cfg, std::uint64_t seed, CurveWriter& writer,
               BestCheckpoint& best, std::vector<CurveRow>& curve) {
  const std::unique_ptr<Env> env = build_env(cfg);
  NafConfig naf_cfg = cfg.naf;
  naf_cfg.hidden_sizes = parse_architecture(cfg.architecture);

  NafEvalHook hook;
  hook.on_eval = [&](const CurveRow& row, const EvalStats&,
                     const NafNetwork& online, const NafNetwork& target) {
    curve.push_back(row);
    writer.write(row);
    best.offer(row.mean_return, naf_to_json(online, target));
  };
  naf_train(*env, naf_cfg, seed, static_cast<int>(cfg.resolved_max_episodes()),
            cfg.resolved_eval_every(), cfg.eval_episodes, hook);
}

}  // namespace

RunOutcome run_training(const RunConfig& cfg, std::uint64_t seed) {
  RunOutcome outcome;
  outcome.seed = seed;

  const std::vector<std::string> errors = validate_run_config(cfg);
  if (!errors.empty()) {
    outcome.error = "invalid config:";
    for (const std::string& e : errors) outcome.error += "\n  - " + e;
    return outcome;
  }

  RunPaths& paths = outcome.paths;
  paths.dir = cfg.out_dir + "/seed" + std::to_string(seed);
  fs::create_directories(paths.dir);
  paths.curve_csv = paths.dir + "/curve.csv";
  paths.config_json = paths.dir + "/config.json";
  paths.best_checkpoint = paths.dir + "/best_checkpoint.json";
  paths.summary_json = paths.dir + "/summary.json";

  // Echo the fully resolved config for provenance.
  RunConfig resolved = cfg;
  resolved.seeds = {seed};
  save_json(run_config_to_json(resolved), paths.config_json);

  try {
    CurveWriter writer(paths.curve_csv);
    BestCheckpoint best(paths.best_checkpoint, environment_block(cfg),
                        cfg.algorithm);
    if (cfg.algorithm == "dqn_naf") {
      train_naf(cfg, seed, writer, best, outcome.curve);
    } else {
      train_on_policy(cfg, seed, writer, best, outcome.curve);
    }
    outcome.summary = summarize_run(outcome.curve);
    json sj;
    sj["final_avg_return"] = outcome.summary.final_avg_return;
    sj["final_std"] = outcome.summary.final_std;
    sj["max_return"] = outcome.summary.max_return;
    sj["max_return_std"] = outcome.summary.max_return_std;
    sj["episodes_required"] = outcome.summary.episodes_required;
    sj["seed"] = seed;
    save_json(sj, paths.summary_json);
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.error = e.what();
    std::cerr << "run failed (seed " << seed << "): " << e.what() << '\n';
  }
  return outcome;
}

std::string summary_row_csv(const RunConfig& cfg, std::uint64_t seed,
                            const RunSummary& summary) {
  std::int64_t batch = 0;
  if (cfg.algorithm == "vpg") batch = cfg.vpg.batch_timesteps;
  if (cfg.algorithm == "trpo") batch = cfg.trpo.batch_timesteps;
  if (cfg.algorithm == "dqn_naf") batch = cfg.naf.minibatch_size;
  std::string line = cfg.algorithm;
  line += ',' + cfg.environment;
  line += ',' + cfg.architecture;
  line += ',' + std::to_string(batch);
  line += ',' + csv::format(summary.final_avg_return);
  line += ',' + csv::format(summary.final_std);
  line += ',' + csv::format(summary.max_return);
  line += ',' + std::to_string(summary.episodes_required);
  line += ',' + std::to_string(seed);
  return line;
}

std::vector<RunOutcome> run_training_all_seeds(const RunConfig& cfg) {
  std::vector<RunOutcome> outcomes;
  for (const std::uint64_t seed : cfg.seeds) {
    outcomes.push_back(run_training(cfg, seed));
  }

  fs::create_directories(cfg.out_dir);
  std::ofstream summary_csv(cfg.out_dir + "/summary.csv");
  summary_csv << kSummaryCsvHeader << '\n';
  for (const RunOutcome& o : outcomes) {
    if (o.ok) summary_csv << summary_row_csv(cfg, o.seed, o.summary) << '\n';
  }

  std::vector<double> finals;
  for (const RunOutcome& o : outcomes) {
    if (o.ok) finals.push_back(o.summary.final_avg_return);
  }
  if (finals.size() > 1) {
    double mean = 0.0;
    for (const double f : finals) mean += f;
    mean /= static_cast<double>(finals.size());
    double sq = 0.0;
    for (const double f : finals) sq += (f - mean) * (f - mean);
    const double stddev = std::sqrt(sq / static_cast<double>(finals.size()));
    json agg;
    agg["seeds"] = cfg.seeds;
    agg["final_avg_return_mean"] = mean;
    agg["final_avg_return_std"] = stddev;
    save_json(agg, cfg.out_dir + "/aggregate.json");
    std::cout << "aggregate over " << finals.size()
              << " seeds: final avg return " << mean << " +- " << stddev << '\n';
  }
  return outcomes;
}

SweepResult sweep(const std::vector<SweepEntry>& entries, int jobs,
                  const std::string& table_path) {
  SweepResult result;
  std::vector<std::vector<RunOutcome>> per_entry(entries.size());

  std::atomic<std::size_t> next{0};
  const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(entries.size())));
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= entries.size()) return;
        per_entry[i] = run_training_all_seeds(entries[i].cfg);
      }
    });
  }
  for (std::thread& w : workers) w.join();

  std::ostringstream table;
  table << kSummaryCsvHeader << '\n';
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (const RunOutcome& o : per_entry[i]) {
      if (o.ok) {
        table << summary_row_csv(entries[i].cfg, o.seed, o.summary) << '\n';
      } else {
        result.failures.push_back(entries[i].source + " (seed " +
                                  std::to_string(o.seed) + "): " + o.error);
      }
      result.outcomes.push_back(o);
    }
  }
  result.table_csv = table.str();
  if (!table_path.empty()) {
    std::ofstream out(table_path);
    if (!out) throw std::runtime_error("sweep: cannot open " + table_path);
    out << result.table_csv;
  }
  return result;
}

}  // namespace armrl
