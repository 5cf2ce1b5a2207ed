#pragma once

#include <memory>
#include <string>
#include <vector>

#include "armrl/config.hpp"
#include "armrl/env.hpp"
#include "armrl/estimation.hpp"

namespace armrl {

std::unique_ptr<Env> build_env(const RunConfig& cfg);

inline constexpr const char* kCurveCsvHeader =
    "iteration,total_episodes,total_timesteps,mean_return,std_return,kl,"
    "surrogate_improvement";

inline constexpr const char* kSummaryCsvHeader =
    "algo,env,arch,batch,final_avg_return,final_std,max_return,"
    "episodes_required,seed";

std::string curve_row_to_csv(const CurveRow& row);
std::vector<CurveRow> load_curve_csv(const std::string& path);

struct RunPaths {
  std::string dir;
  std::string curve_csv;
  std::string config_json;
  std::string best_checkpoint;
  std::string summary_json;
};

struct RunOutcome {
  bool ok = false;
  std::string error;
  std::uint64_t seed = 0;
  std::vector<CurveRow> curve;
  RunSummary summary;
  RunPaths paths;
};

// One seed of one config: trains, streams the learning curve to
// <out_dir>/seed<seed>/curve.csv, checkpoints the best-evaluated policy, and
// writes a summary. Exceptions (e.g. a mid-run NaN abort) are captured in the
// outcome; artifacts written so far, including the last checkpoint, remain on
// disk.
RunOutcome run_training(const RunConfig& cfg, std::uint64_t seed);

// All seeds of the config, sequentially; writes <out_dir>/summary.csv (one
// row per seed) and, for multi-seed runs, an aggregate of the final average
// return across seeds into <out_dir>/aggregate.json.
std::vector<RunOutcome> run_training_all_seeds(const RunConfig& cfg);

struct SweepEntry {
  RunConfig cfg;
  std::string source;  // config file path, for error reporting
};

struct SweepResult {
  std::vector<RunOutcome> outcomes;  // all seeds of all configs, config order
  std::vector<std::string> failures;
  std::string table_csv;             // merged comparison table
};

// Runs every config (parallel across runs, never within a learner's update
// path) and merges the per-seed summaries into one table keyed by
// (algo, env, arch, batch). Individual failures are recorded and the sweep
// continues.
SweepResult sweep(const std::vector<SweepEntry>& entries, int jobs,
                  const std::string& table_path);

std::string summary_row_csv(const RunConfig& cfg, std::uint64_t seed,
                            const RunSummary& summary);

}  // namespace armrl
