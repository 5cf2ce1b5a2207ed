#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "armrl/rng.hpp"

namespace armrl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Activation { kTanh, kRelu, kIdentity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

// Dense multi-layer perceptron, double precision throughout. Hidden layers
// share one activation; the output layer is always identity. Parameters
// flatten to a single vector (per layer: weight matrix column-major, then
// bias), and set_params(flatten_params()) is the identity.
class Mlp {
 public:
  Mlp() = default;
  // layer_sizes = {input, hidden..., output}; all entries positive.
  // Parameters start at zero.
  Mlp(std::vector<int> layer_sizes, Activation hidden_activation);

  // Scaled-uniform fan-in initialization: W ~ U[-1/sqrt(fan_in), 1/sqrt(fan_in)],
  // biases zero. The last layer is multiplied by last_layer_scale (policy mean
  // nets use 0.01 so initial actions are near zero).
  void init_params(Rng& rng, double last_layer_scale = 1.0);

  int input_dim() const { return layer_sizes_.front(); }
  int output_dim() const { return layer_sizes_.back(); }
  int num_layers() const { return static_cast<int>(weights_.size()); }
  int num_params() const { return num_params_; }
  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  Activation hidden_activation() const { return hidden_activation_; }

  Vec forward(const Vec& input) const;

  // Per-layer forward state for reuse by backward/jvp. h[0] is the input,
  // h[i+1] the activation of layer i; z[i] the pre-activation of layer i.
  struct Cache {
    std::vector<Vec> h;
    std::vector<Vec> z;
    const Vec& output() const { return h.back(); }
  };
  const Vec& forward(const Vec& input, Cache& cache) const;

  struct Gradients {
    Vec params;
    Vec input;
  };
  // Backpropagation of output_grad (= dL/dy). Runs its own forward pass.
  Gradients backward(const Vec& input, const Vec& output_grad) const;

  // Backprop from an existing cache, accumulating the parameter gradient into
  // param_acc (must have num_params() entries). Used by the batch kernels.
  void backward_from_cache(const Cache& cache, const Vec& output_grad,
                           Eigen::Ref<Vec> param_acc,
                           Vec* input_grad = nullptr) const;

  // Directional derivative of the output with respect to the parameters:
  // returns (dy/dtheta) * v for the input recorded in cache.
  Vec param_jvp(const Cache& cache, const Eigen::Ref<const Vec>& v) const;

  Vec flatten_params() const;
  void set_params(const Eigen::Ref<const Vec>& flat);

  Mat& weight(int layer) { return weights_[layer]; }
  const Mat& weight(int layer) const { return weights_[layer]; }
  Vec& bias(int layer) { return biases_[layer]; }
  const Vec& bias(int layer) const { return biases_[layer]; }

 private:
  std::vector<int> layer_sizes_;
  Activation hidden_activation_ = Activation::kTanh;
  std::vector<Mat> weights_;
  std::vector<Vec> biases_;
  int num_params_ = 0;
};

}  // namespace armrl
