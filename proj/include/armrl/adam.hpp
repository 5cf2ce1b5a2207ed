#pragma once

#include "armrl/mlp.hpp"

namespace armrl {

// Adam optimizer state for one flat parameter vector. Minimizes: the update is
// theta -= alpha * mhat / (sqrt(vhat) + eps). Callers doing gradient ascent
// pass the negated gradient.
struct AdamState {
  explicit AdamState(int num_params, double learning_rate = 1e-3,
                     double beta1 = 0.9, double beta2 = 0.999,
                     double epsilon = 1e-8)
      : alpha(learning_rate),
        beta1(beta1),
        beta2(beta2),
        epsilon(epsilon),
        m(Vec::Zero(num_params)),
        v(Vec::Zero(num_params)) {}

  double alpha;
  double beta1;
  double beta2;
  double epsilon;
  long step = 0;
  Vec m;
  Vec v;
};

// One bias-corrected Adam step in place. Throws on non-finite gradients so a
// diverging run fails loudly instead of training on garbage.
void adam_step(Eigen::Ref<Vec> params, const Eigen::Ref<const Vec>& grad,
               AdamState& state);

}  // namespace armrl
