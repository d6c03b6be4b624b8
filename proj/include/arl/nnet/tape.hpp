#pragma once

#include "arl/nnet/layers.hpp"

#include <span>
#include <unordered_map>
#include <vector>

namespace arl::nnet {

/// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
};

/// Parameter gradients produced by Tape::backward. Parameters the forward pass
/// never touched report an all-zero gradient of the right shape.
class Gradients {
 public:
  Matrix operator[](const Parameter& p) const;
  bool touched(const Parameter& p) const { return grads_.contains(&p); }
  Matrix& accumulator(const Parameter& p);

 private:
  std::unordered_map<const Parameter*, Matrix> grads_;
};

/// Ordered record of forward operations for reverse-mode differentiation.
///
/// Layers are referenced, not copied: they must outlive the tape and must not
/// be modified between recording and calling backward(). Recurrent steps are
/// chained by feeding the hidden/cell vars of one step into the next, so the
/// tape window bounds backpropagation through time.
class Tape {
 public:
  Var constant(Vector value);
  Var scalar(double value);

  Var dense(const DenseLayer& layer, Var input);

  struct LstmVars {
    Var hidden;
    Var cell;
  };
  LstmVars lstm(const LstmCell& cell, Var input, Var hidden, Var cell_state);

  /// max(x, floor) elementwise; the gradient is blocked where the floor is active.
  Var floor(Var x, double floor_value);
  Var square(Var x);
  Var scale(Var x, double factor);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  /// Sum / mean of scalar vars.
  Var sum(std::span<const Var> terms);
  Var mean(std::span<const Var> terms);

  /// -0.5 * (ln(2 pi var) + (u - mu)^2 / var) for scalar mu and var.
  Var gaussian_log_prob(Var mean, Var variance, double sample);
  /// 0.5 * (ln(2 pi var) + 1) for scalar var.
  Var gaussian_entropy(Var variance);

  const Vector& value(Var v) const;
  double scalar_value(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  /// Gradients of the scalar `loss` with respect to every parameter used in the
  /// recorded forward pass. Throws UsageError if `loss` is not a scalar var.
  Gradients backward(Var loss) const;

 private:
  enum class Op {
    constant,
    dense,
    lstm,
    slice,
    floor,
    square,
    scale,
    add,
    sub,
    sum,
    log_prob,
    entropy
  };

  struct Node {
    Op op = Op::constant;
    Vector value;
    std::vector<int> inputs;
    Vector cache;  // pre-activation (dense) or gate activations (lstm)
    const DenseLayer* dense = nullptr;
    const LstmCell* lstm = nullptr;
    double param = 0.0;  // floor value, scale factor, sample, or 1/n for mean
    int offset = 0;      // slice start
  };

  static Node make_node(Op op, Vector value, std::vector<int> inputs);
  Var push(Node node);
  const Node& node(Var v) const;

  std::vector<Node> nodes_;
};

}  // namespace arl::nnet
