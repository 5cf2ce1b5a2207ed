#pragma once

#include <vector>

#include "armrl/estimation.hpp"
#include "armrl/gaussian_policy.hpp"

namespace armrl {

struct TrpoConfig {
  double delta_d = 0.01;        // policy trust region
  double delta_v = 0.01;        // baseline trust region
  int cg_iterations = 10;       // n_CG
  double cg_damping = 0.1;      // added to the FVP
  double backtrack_coeff = 0.5; // nu
  int max_backtracks = 10;      // L; exponents run l = 0 .. L-1
  int batch_timesteps = 6000;   // nominal B; episodes per iter = B / horizon
  GaeConfig gae;
  std::vector<int> baseline_hidden{100, 100};  // relu value net
  double baseline_damping = 1e-5;
  // Fit the baseline before estimating advantages (the freshly fitted value
  // function feeds GAE); flip to fit after, using last iteration's baseline
  // for the advantages.
  bool fit_baseline_first = true;
  // Include the gamma^t weighting of the gradient estimate. Off by default;
  // on restores the literal discounted-state formula.
  bool discounted_state_weighting = false;

  int episodes_per_iteration(int horizon) const {
    return std::max(1, batch_timesteps / std::max(1, horizon));
  }
  void validate() const;
};

struct TrpoStepResult {
  bool accepted = false;
  int backtracks_used = 0;      // exponent l of the accepted candidate
  double kl = 0.0;              // measured KL of the accepted step (0 if rejected)
  double surrogate_improvement = 0.0;
  double grad_norm = 0.0;
  double g_dot_hinv_g = 0.0;
  std::vector<double> candidate_kls;  // KL per line-search candidate
  BaselineFitResult baseline;
};

// Importance-weighted surrogate gain of the candidate policy against the
// collected batch: mean over episodes of sum_t (ratio - 1) * weight, which is
// exactly zero for the data-collecting policy.
double surrogate_improvement(const GaussianMlpPolicy& candidate,
                             const std::vector<Vec>& states,
                             const std::vector<Vec>& actions_raw,
                             const std::vector<double>& old_log_probs,
                             const std::vector<double>& weights,
                             std::int64_t n_episodes);

// One full trust-region update: fit the baseline, estimate GAE advantages,
// build the policy gradient, CG-solve the natural direction against the
// Fisher metric, scale to the trust radius, then backtrack geometrically
// until the surrogate improves (>= 0) and the KL stays within delta_d. If no
// candidate passes, the policy is left unchanged.
TrpoStepResult trpo_step(GaussianMlpPolicy& policy,
                         const std::vector<Trajectory>& trajs, Mlp& value_net,
                         const TrpoConfig& cfg);

}  // namespace armrl
