#pragma once

#include "arl/nnet/tape.hpp"

#include <vector>

namespace arl::nnet {

struct RmsPropConfig {
  double decay = 0.9;       // alpha
  double epsilon = 1e-10;   // added outside the square root
  double momentum = 0.0;
};

/// RMSProp over a fixed list of parameters:
///   acc <- alpha * acc + (1 - alpha) * g^2
///   theta <- theta - lr * g / (sqrt(acc) + eps)
/// A non-zero momentum keeps a velocity buffer of the scaled step.
class RmsProp {
 public:
  RmsProp(std::vector<Parameter*> params, RmsPropConfig config);

  /// Throws ConfigError if a gradient shape does not match its parameter.
  void step(const Gradients& grads, double learning_rate);

  const RmsPropConfig& config() const { return config_; }
  const Matrix& accumulator(std::size_t i) const { return accumulators_.at(i); }
  std::size_t size() const { return params_.size(); }

 private:
  std::vector<Parameter*> params_;
  RmsPropConfig config_;
  std::vector<Matrix> accumulators_;
  std::vector<Matrix> velocity_;
};

}  // namespace arl::nnet
