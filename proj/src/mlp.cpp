#include "armrl/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace armrl {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kIdentity: return "identity";
  }
  return "tanh";
}

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  if (s == "identity") return Activation::kIdentity;
  throw std::invalid_argument("unknown activation: " + s);
}

namespace {

inline void apply_activation(Activation act, const Vec& z, Vec& out) {
  switch (act) {
    case Activation::kTanh:
      out = z.array().tanh();
      break;
    case Activation::kRelu:
      out = z.cwiseMax(0.0);
      break;
    case Activation::kIdentity:
      out = z;
      break;
  }
}

// Derivative of the activation as a function of the pre-activation z.
inline Vec activation_deriv(Activation act, const Vec& z) {
  switch (act) {
    case Activation::kTanh: {
      Vec t = z.array().tanh();
      return (1.0 - t.array().square()).matrix();
    }
    case Activation::kRelu:
      return (z.array() > 0.0).cast<double>().matrix();
    case Activation::kIdentity:
      return Vec::Ones(z.size());
  }
  return Vec::Ones(z.size());
}

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes, Activation hidden_activation)
    : layer_sizes_(std::move(layer_sizes)),
      hidden_activation_(hidden_activation) {
  if (layer_sizes_.size() < 2) {
    throw std::invalid_argument("Mlp needs at least input and output sizes");
  }
  for (const int s : layer_sizes_) {
    if (s <= 0) throw std::invalid_argument("Mlp layer sizes must be positive");
  }
  const int n_layers = static_cast<int>(layer_sizes_.size()) - 1;
  weights_.reserve(n_layers);
  biases_.reserve(n_layers);
  num_params_ = 0;
  for (int i = 0; i < n_layers; ++i) {
    weights_.emplace_back(Mat::Zero(layer_sizes_[i + 1], layer_sizes_[i]));
    biases_.emplace_back(Vec::Zero(layer_sizes_[i + 1]));
    num_params_ += layer_sizes_[i + 1] * layer_sizes_[i] + layer_sizes_[i + 1];
  }
}

void Mlp::init_params(Rng& rng, double last_layer_scale) {
  for (int l = 0; l < num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(weights_[l].cols()));
    const double scale = (l == num_layers() - 1) ? last_layer_scale : 1.0;
    for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) {
      for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) {
        weights_[l](r, c) = scale * rng.uniform(-bound, bound);
      }
    }
    biases_[l].setZero();
  }
}

Vec Mlp::forward(const Vec& input) const {
  if (input.size() != input_dim()) {
    throw std::invalid_argument("Mlp::forward: input has size " +
                                std::to_string(input.size()) + ", expected " +
                                std::to_string(input_dim()));
  }
  Vec h = input;
  Vec z;
  for (int l = 0; l < num_layers(); ++l) {
    z.noalias() = weights_[l] * h;
    z += biases_[l];
    const Activation act =
        (l == num_layers() - 1) ? Activation::kIdentity : hidden_activation_;
    apply_activation(act, z, h);
  }
  return h;
}

const Vec& Mlp::forward(const Vec& input, Cache& cache) const {
  if (input.size() != input_dim()) {
    throw std::invalid_argument("Mlp::forward: input has size " +
                                std::to_string(input.size()) + ", expected " +
                                std::to_string(input_dim()));
  }
  const int n = num_layers();
  cache.h.resize(n + 1);
  cache.z.resize(n);
  cache.h[0] = input;
  for (int l = 0; l < n; ++l) {
    cache.z[l].noalias() = weights_[l] * cache.h[l];
    cache.z[l] += biases_[l];
    const Activation act =
        (l == n - 1) ? Activation::kIdentity : hidden_activation_;
    apply_activation(act, cache.z[l], cache.h[l + 1]);
  }
  return cache.h.back();
}

Mlp::Gradients Mlp::backward(const Vec& input, const Vec& output_grad) const {
  Cache cache;
  forward(input, cache);
  Gradients g;
  g.params = Vec::Zero(num_params());
  g.input = Vec::Zero(input_dim());
  backward_from_cache(cache, output_grad, g.params, &g.input);
  return g;
}

void Mlp::backward_from_cache(const Cache& cache, const Vec& output_grad,
                              Eigen::Ref<Vec> param_acc,
                              Vec* input_grad) const {
  if (output_grad.size() != output_dim()) {
    throw std::invalid_argument("Mlp::backward: output_grad has size " +
                                std::to_string(output_grad.size()) +
                                ", expected " + std::to_string(output_dim()));
  }
  const int n = num_layers();
  // Offset of layer l's weight block inside the flattened parameter vector.
  std::vector<int> offsets(n);
  int off = 0;
  for (int l = 0; l < n; ++l) {
    offsets[l] = off;
    off += static_cast<int>(weights_[l].size() + biases_[l].size());
  }

  Vec delta = output_grad;  // dL/dz of the last layer (identity output)
  for (int l = n - 1; l >= 0; --l) {
    const Eigen::Index rows = weights_[l].rows();
    const Eigen::Index cols = weights_[l].cols();
    Eigen::Map<Mat> dw(param_acc.data() + offsets[l], rows, cols);
    Eigen::Map<Vec> db(param_acc.data() + offsets[l] + rows * cols, rows);
    dw.noalias() += delta * cache.h[l].transpose();
    db += delta;
    if (l > 0) {
      Vec back = weights_[l].transpose() * delta;
      delta = back.cwiseProduct(activation_deriv(hidden_activation_, cache.z[l - 1]));
    } else if (input_grad != nullptr) {
      input_grad->noalias() += weights_[0].transpose() * delta;
    }
  }
}

Vec Mlp::param_jvp(const Cache& cache, const Eigen::Ref<const Vec>& v) const {
  if (v.size() != num_params()) {
    throw std::invalid_argument("Mlp::param_jvp: tangent has size " +
                                std::to_string(v.size()) + ", expected " +
                                std::to_string(num_params()));
  }
  const int n = num_layers();
  Vec t = Vec::Zero(input_dim());  // tangent of h (input is not perturbed)
  int off = 0;
  for (int l = 0; l < n; ++l) {
    const Eigen::Index rows = weights_[l].rows();
    const Eigen::Index cols = weights_[l].cols();
    Eigen::Map<const Mat> wt(v.data() + off, rows, cols);
    Eigen::Map<const Vec> bt(v.data() + off + rows * cols, rows);
    off += static_cast<int>(rows * cols + rows);

    Vec tz = wt * cache.h[l] + weights_[l] * t + bt;
    if (l == n - 1) {
      t = tz;
    } else {
      t = tz.cwiseProduct(activation_deriv(hidden_activation_, cache.z[l]));
    }
  }
  return t;
}

Vec Mlp::flatten_params() const {
  Vec flat(num_params());
  int off = 0;
  for (int l = 0; l < num_layers(); ++l) {
    const Eigen::Index wn = weights_[l].size();
    flat.segment(off, wn) = Eigen::Map<const Vec>(weights_[l].data(), wn);
    off += static_cast<int>(wn);
    flat.segment(off, biases_[l].size()) = biases_[l];
    off += static_cast<int>(biases_[l].size());
  }
  return flat;
}

void Mlp::set_params(const Eigen::Ref<const Vec>& flat) {
  if (flat.size() != num_params()) {
    throw std::invalid_argument("Mlp::set_params: got " +
                                std::to_string(flat.size()) + " values, expected " +
                                std::to_string(num_params()));
  }
  int off = 0;
  for (int l = 0; l < num_layers(); ++l) {
    const Eigen::Index wn = weights_[l].size();
    Eigen::Map<Vec>(weights_[l].data(), wn) = flat.segment(off, wn);
    off += static_cast<int>(wn);
    biases_[l] = flat.segment(off, biases_[l].size());
    off += static_cast<int>(biases_[l].size());
  }
}

}  // namespace armrl
