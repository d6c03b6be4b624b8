#pragma once

#include "arl/nnet/network.hpp"
#include "arl/nnet/tape.hpp"

#include <array>
#include <random>

namespace arl::a2c {

using Observation = std::array<double, 4>;

struct PolicyOutput {
  double mean = 0.0;      // tanh head
  double variance = 1.0;  // softplus head, floored
};

/// -0.5 * (ln(2 pi var) + (u - mu)^2 / var)
double log_prob(double mean, double variance, double u);
/// 0.5 * (ln(2 pi var) + 1)
double entropy(double variance);
double sample_action(const PolicyOutput& policy, std::mt19937_64& rng);

struct ActorShape {
  int inputs = 4;
  int hidden_units = 50;
  int hidden_layers = 3;
  int lstm_units = 16;
};

/// Dense(relu6) x hidden_layers -> LSTM -> {mu: dense tanh, sigma^2: dense softplus}.
class ActorNetwork {
 public:
  explicit ActorNetwork(ActorShape shape = {}, double variance_floor = 1e-4);

  nnet::Network& network() { return net_; }
  const nnet::Network& network() const { return net_; }
  const ActorShape& shape() const { return shape_; }
  double variance_floor() const { return variance_floor_; }
  int lstm_units() const { return shape_.lstm_units; }

  nnet::RecurrentState initial_state() const {
    return nnet::RecurrentState::zeros(shape_.lstm_units);
  }

  /// Inference; advances `state` by one step.
  PolicyOutput forward(const Observation& obs, nnet::RecurrentState& state) const;

  struct TapedStep {
    nnet::Var mean;
    nnet::Var variance;
    nnet::Var hidden;
    nnet::Var cell;
  };
  TapedStep forward(nnet::Tape& tape, const Observation& obs, nnet::Var hidden,
                    nnet::Var cell) const;

 private:
  const nnet::LstmCell& lstm() const;
  const nnet::DenseLayer& mean_head() const;
  const nnet::DenseLayer& variance_head() const;

  ActorShape shape_;
  double variance_floor_;
  nnet::Network net_;
};

struct CriticShape {
  int inputs = 4;
  int hidden_units = 50;
  int hidden_layers = 2;
};

/// Dense(relu6) x hidden_layers -> dense linear scalar.
class CriticNetwork {
 public:
  explicit CriticNetwork(CriticShape shape = {});

  nnet::Network& network() { return net_; }
  const nnet::Network& network() const { return net_; }

  double value(const Observation& obs) const;
  nnet::Var value(nnet::Tape& tape, const Observation& obs) const;

 private:
  nnet::Network net_;
};

}  // namespace arl::a2c
