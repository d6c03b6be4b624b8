#include "arl/nnet/rmsprop.hpp"

#include "arl/error.hpp"

namespace arl::nnet {

RmsProp::RmsProp(std::vector<Parameter*> params, RmsPropConfig config)
    : params_(std::move(params)), config_(config) {
  if (!(config_.decay > 0.0 && config_.decay < 1.0))
    throw ConfigError("rmsprop decay must lie in (0, 1)");
  if (!(config_.epsilon > 0.0)) throw ConfigError("rmsprop epsilon must be positive");
  if (config_.momentum < 0.0) throw ConfigError("rmsprop momentum must be non-negative");
  for (const Parameter* p : params_) {
    accumulators_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    if (config_.momentum > 0.0) velocity_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void RmsProp::step(const Gradients& grads, double learning_rate) {
  const double alpha = config_.decay;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Parameter& p = *params_[k];
    const Matrix g = grads[p];
    if (g.rows() != p.value.rows() || g.cols() != p.value.cols())
      throw ConfigError("gradient shape mismatch for " + p.name);
    Matrix& acc = accumulators_[k];
    acc = alpha * acc + (1.0 - alpha) * g.cwiseProduct(g);
    const Matrix scaled =
        g.array() / (acc.array().sqrt() + config_.epsilon);
    if (config_.momentum > 0.0) {
      velocity_[k] = config_.momentum * velocity_[k] + scaled;
      p.value -= learning_rate * velocity_[k];
    } else {
      p.value -= learning_rate * scaled;
    }
  }
}

}  // namespace arl::nnet
