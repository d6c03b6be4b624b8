#include "arl/nnet/layers.hpp"

#include "arl/error.hpp"

#include <algorithm>
#include <cmath>

namespace arl::nnet {

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::relu6:
      return "relu6";
    case Activation::tanh:
      return "tanh";
    case Activation::softplus:
      return "softplus";
    case Activation::linear:
      return "linear";
  }
  return "linear";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu6") return Activation::relu6;
  if (name == "tanh") return Activation::tanh;
  if (name == "softplus") return Activation::softplus;
  if (name == "linear") return Activation::linear;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  // log1p(exp(x)) overflows for large x
  return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

Vector activate(Activation act, const Vector& pre) {
  switch (act) {
    case Activation::relu6:
      return pre.cwiseMax(0.0).cwiseMin(6.0);
    case Activation::tanh:
      return pre.array().tanh().matrix();
    case Activation::softplus:
      return pre.unaryExpr([](double x) { return softplus(x); });
    case Activation::linear:
      return pre;
  }
  return pre;
}

Vector activation_derivative(Activation act, const Vector& pre, const Vector& post) {
  switch (act) {
    case Activation::relu6:
      return pre.unaryExpr([](double x) { return (x > 0.0 && x < 6.0) ? 1.0 : 0.0; });
    case Activation::tanh:
      return (1.0 - post.array().square()).matrix();
    case Activation::softplus:
      return pre.unaryExpr([](double x) { return sigmoid(x); });
    case Activation::linear:
      return Vector::Ones(pre.size());
  }
  return Vector::Ones(pre.size());
}

namespace {

void fill_uniform(Matrix& m, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
}

}  // namespace

DenseLayer::DenseLayer(std::string name, int in_size, int out_size, Activation act)
    : weights{name + ".weights", Matrix::Zero(out_size, in_size)},
      biases{name + ".biases", Matrix::Zero(out_size, 1)},
      activation(act) {
  if (in_size <= 0 || out_size <= 0)
    throw ConfigError("dense layer '" + name + "' needs positive sizes");
}

void DenseLayer::initialize(std::mt19937_64& rng) {
  fill_uniform(weights.value, std::sqrt(6.0 / (in_size() + out_size())), rng);
  biases.value.setZero();
}

LstmCell::LstmCell(std::string name, int input_size, int hidden_size)
    : input_weights{name + ".input_weights", Matrix::Zero(4 * hidden_size, input_size)},
      recurrent_weights{name + ".recurrent_weights", Matrix::Zero(4 * hidden_size, hidden_size)},
      biases{name + ".biases", Matrix::Zero(4 * hidden_size, 1)} {
  if (input_size <= 0 || hidden_size <= 0)
    throw ConfigError("lstm cell '" + name + "' needs positive sizes");
}

void LstmCell::initialize(std::mt19937_64& rng) {
  const int h = hidden_size();
  const double limit = std::sqrt(6.0 / (input_size() + h + h));
  fill_uniform(input_weights.value, limit, rng);
  fill_uniform(recurrent_weights.value, limit, rng);
  biases.value.setZero();
  biases.value.block(kForgetGate * h, 0, h, 1).setOnes();
}

RecurrentState RecurrentState::zeros(int hidden_size) {
  return {Vector::Zero(hidden_size), Vector::Zero(hidden_size)};
}

bool RecurrentState::is_zero() const {
  return (hidden.size() == 0 || hidden.isZero(0.0)) && (cell.size() == 0 || cell.isZero(0.0));
}

Vector dense_forward(const DenseLayer& layer, const Vector& input) {
  if (input.size() != layer.in_size())
    throw ConfigError(layer.weights.name + ": input length " + std::to_string(input.size()) +
                      " != layer input size " + std::to_string(layer.in_size()));
  Vector pre = layer.biases.value.col(0);
  pre.noalias() += layer.weights.value * input;
  return activate(layer.activation, pre);
}

Vector lstm_step(const LstmCell& cell, const Vector& input, RecurrentState& state) {
  const int h = cell.hidden_size();
  if (input.size() != cell.input_size())
    throw ConfigError(cell.biases.name + ": input length " + std::to_string(input.size()) +
                      " != cell input size " + std::to_string(cell.input_size()));
  if (state.hidden.size() != h || state.cell.size() != h)
    throw ConfigError(cell.biases.name + ": recurrent state length does not match hidden size " +
                      std::to_string(h));
  Vector z = cell.biases.value.col(0);
  z.noalias() += cell.input_weights.value * input;
  z.noalias() += cell.recurrent_weights.value * state.hidden;
  const Vector i = z.segment(0, h).unaryExpr([](double x) { return sigmoid(x); });
  const Vector f = z.segment(h, h).unaryExpr([](double x) { return sigmoid(x); });
  const Vector g = z.segment(2 * h, h).array().tanh().matrix();
  const Vector o = z.segment(3 * h, h).unaryExpr([](double x) { return sigmoid(x); });
  state.cell = f.cwiseProduct(state.cell) + i.cwiseProduct(g);
  state.hidden = o.cwiseProduct(state.cell.array().tanh().matrix());
  return state.hidden;
}

}  // namespace arl::nnet
