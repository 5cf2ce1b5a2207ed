#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "armrl/env.hpp"
#include "armrl/mlp.hpp"

namespace armrl {

struct Transition {
  Vec s;
  Vec a_raw;  // unclamped draw, consumed by the estimators
  Vec a_env;  // clamped action, what the environment executed
  double r = 0.0;
  Vec s_next;
  // True task terminal (success or bad terminal). Horizon truncation leaves
  // this false so the estimators bootstrap with V(s_T) instead of zero.
  bool terminal = false;
  int t = 0;
  StepInfo info;
};

// One episode of contiguous transitions, t starting at 0. Only the last
// transition may be terminal.
struct Trajectory {
  std::vector<Transition> transitions;
  double total_reward = 0.0;

  int length() const { return static_cast<int>(transitions.size()); }
  bool terminated() const {
    return !transitions.empty() && transitions.back().terminal;
  }
  void push(Transition tr);
  // total_reward is maintained incrementally but never trusted: this recomputes
  // the sum and checks contiguity, throwing on mismatch.
  void validate() const;
};

struct GaeConfig {
  double gamma = 0.99;
  double lambda = 0.97;
  void validate() const;
};

using ValueFn = std::function<double(const Vec&)>;

// R_t^gamma = sum_{k>=t} gamma^(k-t) r_k within the episode.
double discounted_return(const Trajectory& traj, double gamma, int from_t);

// GAE(lambda) advantages, one vector per trajectory. Terminal episodes
// bootstrap with 0 past the end; horizon-truncated episodes bootstrap with
// value_fn(s_T).
std::vector<std::vector<double>> gae_advantages(
    const std::vector<Trajectory>& trajs, const ValueFn& value_fn,
    const GaeConfig& cfg);

// Per-timestep regression targets for the baseline: the empirical discounted
// return, plus gamma^(T-t) * value_fn(s_T) when the episode was truncated by
// the horizon rather than terminated.
std::vector<std::vector<double>> return_targets(
    const std::vector<Trajectory>& trajs, double gamma, const ValueFn& value_fn);

// In-place shift/scale to zero mean and unit variance (population). Batches
// with vanishing spread are only centered. Returns {mean, std}.
std::pair<double, double> standardize(std::vector<std::vector<double>>& values);

// ---- baseline fitting -------------------------------------------------

// Matrix-free Gauss-Newton metric of the mean-squared-error loss of a scalar
// net: G = (2/N) sum_i grad V(s_i) grad V(s_i)^T. Caches forward passes so the
// CG solve can apply the operator repeatedly.
class GaussNewtonContext {
 public:
  GaussNewtonContext(const Mlp& net, const std::vector<Vec>& states);
  Vec apply(const Eigen::Ref<const Vec>& v, double damping) const;
  Vec apply_serial(const Eigen::Ref<const Vec>& v, double damping) const;

 private:
  const Mlp& net_;
  std::vector<Mlp::Cache> caches_;
};

double value_mse(const Mlp& net, const std::vector<Vec>& states,
                 const std::vector<double>& targets);
// Gradient of value_mse with respect to the net parameters.
Vec value_mse_gradient(const Mlp& net, const std::vector<Vec>& states,
                       const std::vector<double>& targets);
Vec value_mse_gradient_serial(const Mlp& net, const std::vector<Vec>& states,
                              const std::vector<double>& targets);

struct BaselineFitResult {
  bool updated = false;
  int halvings = 0;
  double mse_before = 0.0;
  double mse_after = 0.0;
};

// One trust-region Gauss-Newton step on the squared error: CG-solve
// (G + damping I) x = -grad, scale x so the quadratic model (1/2) x^T G x
// equals delta_v, then halve (up to max_halvings) until the training MSE does
// not increase; if it still increases the update is skipped. The training MSE
// never goes up.
BaselineFitResult fit_baseline(Mlp& value_net, const std::vector<Vec>& states,
                               const std::vector<double>& targets,
                               double delta_v, int n_cg,
                               double damping = 1e-5, int max_halvings = 10);

// ---- evaluation protocol ----------------------------------------------

using DeterministicPolicy = std::function<Vec(const Vec&)>;

struct EvalStats {
  double mean_return = 0.0;
  double std_return = 0.0;  // population (divisor N)
  double success_rate = 0.0;
  double bad_terminal_rate = 0.0;
  double mean_length = 0.0;
  std::vector<double> returns;
};

// Runs n_episodes full episodes of `act` (typically the policy mean, noise
// free) and reports the mean and population standard deviation of the
// undiscounted episode returns.
EvalStats evaluate_policy(const DeterministicPolicy& act, const Env& env,
                          int n_episodes, Rng& rng);

// ---- learning-curve records --------------------------------------------

struct CurveRow {
  std::int64_t iteration = 0;
  std::int64_t total_episodes = 0;
  std::int64_t total_timesteps = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  double kl = std::numeric_limits<double>::quiet_NaN();
  double surrogate_improvement = std::numeric_limits<double>::quiet_NaN();
  // Not serialized in the CSV schema; carried for summaries and gates.
  double success_rate = 0.0;
};

struct RunSummary {
  double final_avg_return = 0.0;
  double final_std = 0.0;  // population std of the final-window means
  double max_return = 0.0;
  double max_return_std = 0.0;
  std::int64_t episodes_required = 0;
};

// Final window = last 10 evaluation points (or all, if fewer). MaxReturn is
// the best mean with its own per-evaluation std. EpisodesRequired is the
// first episode count whose mean reaches FinalAvgReturn minus the final
// window's std.
RunSummary summarize_run(const std::vector<CurveRow>& curve);

}  // namespace armrl
