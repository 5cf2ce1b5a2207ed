#pragma once

#include <functional>

#include "armrl/mlp.hpp"

namespace armrl {

// Matrix-free linear operator x -> A x.
using LinearOp = std::function<Vec(const Eigen::Ref<const Vec>&)>;

struct CgResult {
  Vec x;
  int iterations = 0;
  double residual_norm = 0.0;
  // True when a direction with non-positive curvature was met; x holds the
  // last iterate before the breakdown.
  bool breakdown = false;
};

// Conjugate gradient for symmetric positive (semi-)definite operators.
// Runs at most max_iterations steps, stopping early once the residual norm
// drops below residual_tol. Throws on non-finite intermediates, naming the
// iteration.
CgResult conjugate_gradient(const LinearOp& apply, const Eigen::Ref<const Vec>& rhs,
                            int max_iterations, double residual_tol = 1e-10);

}  // namespace armrl
