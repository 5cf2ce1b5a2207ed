#include "armrl/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace armrl {

void adam_step(Eigen::Ref<Vec> params, const Eigen::Ref<const Vec>& grad,
               AdamState& state) {
  if (params.size() != grad.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: size mismatch (params " +
                                std::to_string(params.size()) + ", grad " +
                                std::to_string(grad.size()) + ", state " +
                                std::to_string(state.m.size()) + ")");
  }
  if (!grad.allFinite()) {
    throw std::runtime_error("adam_step: non-finite gradient");
  }
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v.array().matrix() +
            (1.0 - state.beta2) * grad.array().square().matrix();
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params -= (state.alpha * (state.m / bc1).array() /
             ((state.v / bc2).array().sqrt() + state.epsilon))
                .matrix();
}

}  // namespace armrl
