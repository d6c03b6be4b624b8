#include "arl/a2c/networks.hpp"

#include "arl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace arl::a2c {

using nnet::Activation;
using nnet::DenseLayer;
using nnet::LstmCell;
using nnet::Vector;

double log_prob(double mean, double variance, double u) {
  const double d = u - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + d * d / variance);
}

double entropy(double variance) {
  return 0.5 * (std::log(2.0 * std::numbers::pi * variance) + 1.0);
}

double sample_action(const PolicyOutput& policy, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  return policy.mean + std::sqrt(policy.variance) * noise(rng);
}

namespace {

std::string layer_name(std::size_t i) { return "layer" + std::to_string(i); }

Vector to_vector(const Observation& obs) { return Vector::Map(obs.data(), 4); }

}  // namespace

ActorNetwork::ActorNetwork(ActorShape shape, double variance_floor)
    : shape_(shape), variance_floor_(variance_floor) {
  if (shape.hidden_layers < 1) throw ConfigError("actor needs at least one hidden layer");
  if (!(variance_floor > 0.0)) throw ConfigError("variance floor must be positive");
  int in = shape.inputs;
  for (int k = 0; k < shape.hidden_layers; ++k) {
    net_.add(DenseLayer(layer_name(net_.layer_count()), in, shape.hidden_units, Activation::relu6));
    in = shape.hidden_units;
  }
  net_.add(LstmCell(layer_name(net_.layer_count()), in, shape.lstm_units));
  net_.add(DenseLayer(layer_name(net_.layer_count()), shape.lstm_units, 1, Activation::tanh));
  net_.add(DenseLayer(layer_name(net_.layer_count()), shape.lstm_units, 1, Activation::softplus));
}

const LstmCell& ActorNetwork::lstm() const {
  return net_.as<LstmCell>(static_cast<std::size_t>(shape_.hidden_layers));
}
const DenseLayer& ActorNetwork::mean_head() const {
  return net_.as<DenseLayer>(static_cast<std::size_t>(shape_.hidden_layers) + 1);
}
const DenseLayer& ActorNetwork::variance_head() const {
  return net_.as<DenseLayer>(static_cast<std::size_t>(shape_.hidden_layers) + 2);
}

PolicyOutput ActorNetwork::forward(const Observation& obs, nnet::RecurrentState& state) const {
  Vector x = to_vector(obs);
  for (int k = 0; k < shape_.hidden_layers; ++k)
    x = nnet::dense_forward(net_.as<DenseLayer>(static_cast<std::size_t>(k)), x);
  const Vector h = nnet::lstm_step(lstm(), x, state);
  return {nnet::dense_forward(mean_head(), h)[0],
          std::max(nnet::dense_forward(variance_head(), h)[0], variance_floor_)};
}

ActorNetwork::TapedStep ActorNetwork::forward(nnet::Tape& tape, const Observation& obs,
                                              nnet::Var hidden, nnet::Var cell) const {
  nnet::Var x = tape.constant(to_vector(obs));
  for (int k = 0; k < shape_.hidden_layers; ++k)
    x = tape.dense(net_.as<DenseLayer>(static_cast<std::size_t>(k)), x);
  const auto rec = tape.lstm(lstm(), x, hidden, cell);
  const nnet::Var mean = tape.dense(mean_head(), rec.hidden);
  const nnet::Var variance = tape.floor(tape.dense(variance_head(), rec.hidden), variance_floor_);
  return {mean, variance, rec.hidden, rec.cell};
}

CriticNetwork::CriticNetwork(CriticShape shape) {
  if (shape.hidden_layers < 1) throw ConfigError("critic needs at least one hidden layer");
  int in = shape.inputs;
  for (int k = 0; k < shape.hidden_layers; ++k) {
    net_.add(DenseLayer(layer_name(net_.layer_count()), in, shape.hidden_units, Activation::relu6));
    in = shape.hidden_units;
  }
  net_.add(DenseLayer(layer_name(net_.layer_count()), in, 1, Activation::linear));
}

double CriticNetwork::value(const Observation& obs) const {
  Vector x = to_vector(obs);
  for (std::size_t k = 0; k < net_.layer_count(); ++k) x = nnet::dense_forward(net_.as<DenseLayer>(k), x);
  return x[0];
}

nnet::Var CriticNetwork::value(nnet::Tape& tape, const Observation& obs) const {
  nnet::Var x = tape.constant(to_vector(obs));
  for (std::size_t k = 0; k < net_.layer_count(); ++k) x = tape.dense(net_.as<DenseLayer>(k), x);
  return x;
}

}  // namespace arl::a2c
