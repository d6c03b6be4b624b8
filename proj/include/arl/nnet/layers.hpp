#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace arl::nnet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Activation { relu6, tanh, softplus, linear };

std::string_view to_string(Activation act);
/// Throws ConfigError for anything other than the four known names.
Activation parse_activation(std::string_view name);

Vector activate(Activation act, const Vector& pre);
/// Elementwise derivative of the activation, given pre- and post-activation values.
Vector activation_derivative(Activation act, const Vector& pre, const Vector& post);

double sigmoid(double x);
double softplus(double x);

/// A named block of trainable values. Bias vectors are stored as n x 1.
struct Parameter {
  std::string name;
  Matrix value;
};

class DenseLayer {
 public:
  DenseLayer(std::string name, int in_size, int out_size, Activation activation);

  int in_size() const { return static_cast<int>(weights.value.cols()); }
  int out_size() const { return static_cast<int>(weights.value.rows()); }

  /// Uniform weights in +-sqrt(6 / (in + out)), zero biases.
  void initialize(std::mt19937_64& rng);

  Parameter weights;  // out x in
  Parameter biases;   // out x 1
  Activation activation;
};

/// Gate blocks are stacked row-wise in the order input, forget, candidate, output.
class LstmCell {
 public:
  LstmCell(std::string name, int input_size, int hidden_size);

  int input_size() const { return static_cast<int>(input_weights.value.cols()); }
  int hidden_size() const { return static_cast<int>(recurrent_weights.value.cols()); }

  /// Uniform weights in +-sqrt(6 / (in + hidden)) per gate block, zero biases
  /// except the forget gate which starts at 1.
  void initialize(std::mt19937_64& rng);

  Parameter input_weights;      // 4H x I
  Parameter recurrent_weights;  // 4H x H
  Parameter biases;             // 4H x 1

  static constexpr int kInputGate = 0;
  static constexpr int kForgetGate = 1;
  static constexpr int kCandidate = 2;
  static constexpr int kOutputGate = 3;
};

struct RecurrentState {
  Vector hidden;
  Vector cell;

  static RecurrentState zeros(int hidden_size);
  bool is_zero() const;
};

/// Inference-only forward passes; the taped versions live in tape.hpp.
Vector dense_forward(const DenseLayer& layer, const Vector& input);
/// Returns the new hidden state (the layer output) and updates `state` in place.
Vector lstm_step(const LstmCell& cell, const Vector& input, RecurrentState& state);

}  // namespace arl::nnet
