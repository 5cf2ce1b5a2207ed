#include "armrl/cg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace armrl {

CgResult conjugate_gradient(const LinearOp& apply,
                            const Eigen::Ref<const Vec>& rhs,
                            int max_iterations, double residual_tol) {
  CgResult result;
  result.x = Vec::Zero(rhs.size());
  Vec r = rhs;  // residual of x = 0
  Vec p = r;
  double r_dot = r.dot(r);
  result.residual_norm = std::sqrt(r_dot);
  if (result.residual_norm < residual_tol) return result;

  for (int it = 0; it < max_iterations; ++it) {
    const Vec ap = apply(p);
    if (!ap.allFinite()) {
      throw std::runtime_error("conjugate_gradient: non-finite operator output at iteration " +
                               std::to_string(it));
    }
    const double p_ap = p.dot(ap);
    if (p_ap <= 0.0) {
      result.breakdown = true;
      return result;
    }
    const double alpha = r_dot / p_ap;
    result.x += alpha * p;
    r -= alpha * ap;
    const double r_dot_next = r.dot(r);
    if (!std::isfinite(r_dot_next)) {
      throw std::runtime_error("conjugate_gradient: non-finite residual at iteration " +
                               std::to_string(it));
    }
    result.iterations = it + 1;
    result.residual_norm = std::sqrt(r_dot_next);
    if (result.residual_norm < residual_tol) return result;
    p = r + (r_dot_next / r_dot) * p;
    r_dot = r_dot_next;
  }
  return result;
}

}  // namespace armrl
