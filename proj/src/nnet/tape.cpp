#include "arl/nnet/tape.hpp"

#include "arl/error.hpp"

#include <cmath>
#include <numbers>

namespace arl::nnet {

Matrix Gradients::operator[](const Parameter& p) const {
  auto it = grads_.find(&p);
  if (it == grads_.end()) return Matrix::Zero(p.value.rows(), p.value.cols());
  return it->second;
}

Matrix& Gradients::accumulator(const Parameter& p) {
  auto [it, inserted] = grads_.try_emplace(&p);
  if (inserted) it->second = Matrix::Zero(p.value.rows(), p.value.cols());
  return it->second;
}

Tape::Node Tape::make_node(Op op, Vector value, std::vector<int> inputs) {
  Node n;
  n.op = op;
  n.value = std::move(value);
  n.inputs = std::move(inputs);
  return n;
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    throw UsageError("var does not belong to this tape");
  return nodes_[static_cast<std::size_t>(v.id)];
}

const Vector& Tape::value(Var v) const { return node(v).value; }

double Tape::scalar_value(Var v) const {
  const Vector& x = value(v);
  if (x.size() != 1) throw UsageError("var is not a scalar");
  return x[0];
}

Var Tape::constant(Vector value) {
  Node n = make_node(Op::constant, std::move(value), {});
  return push(std::move(n));
}

Var Tape::scalar(double value) { return constant(Vector::Constant(1, value)); }

Var Tape::dense(const DenseLayer& layer, Var input) {
  const Vector& x = value(input);
  if (x.size() != layer.in_size())
    throw ConfigError(layer.weights.name + ": input length " + std::to_string(x.size()) +
                      " != layer input size " + std::to_string(layer.in_size()));
  Vector pre = layer.biases.value.col(0);
  pre.noalias() += layer.weights.value * x;
  Node n = make_node(Op::dense, activate(layer.activation, pre), {input.id});
  n.cache = std::move(pre);
  n.dense = &layer;
  return push(std::move(n));
}

Tape::LstmVars Tape::lstm(const LstmCell& cell, Var input, Var hidden, Var cell_state) {
  const int h = cell.hidden_size();
  const Vector& x = value(input);
  const Vector& h_prev = value(hidden);
  const Vector& c_prev = value(cell_state);
  if (x.size() != cell.input_size())
    throw ConfigError(cell.biases.name + ": input length " + std::to_string(x.size()) +
                      " != cell input size " + std::to_string(cell.input_size()));
  if (h_prev.size() != h || c_prev.size() != h)
    throw ConfigError(cell.biases.name + ": recurrent state length does not match hidden size " +
                      std::to_string(h));

  Vector z = cell.biases.value.col(0);
  z.noalias() += cell.input_weights.value * x;
  z.noalias() += cell.recurrent_weights.value * h_prev;
  Vector gates(4 * h);
  gates.segment(0, h) = z.segment(0, h).unaryExpr([](double v) { return sigmoid(v); });
  gates.segment(h, h) = z.segment(h, h).unaryExpr([](double v) { return sigmoid(v); });
  gates.segment(2 * h, h) = z.segment(2 * h, h).array().tanh().matrix();
  gates.segment(3 * h, h) = z.segment(3 * h, h).unaryExpr([](double v) { return sigmoid(v); });

  Vector out(2 * h);
  const Vector c = gates.segment(h, h).cwiseProduct(c_prev) +
                   gates.segment(0, h).cwiseProduct(gates.segment(2 * h, h));
  out.segment(0, h) = gates.segment(3 * h, h).cwiseProduct(c.array().tanh().matrix());
  out.segment(h, h) = c;

  Node n = make_node(Op::lstm, std::move(out), {input.id, hidden.id, cell_state.id});
  n.cache = std::move(gates);
  n.lstm = &cell;
  const Var core = push(std::move(n));

  Node hn = make_node(Op::slice, value(core).segment(0, h), {core.id});
  hn.offset = 0;
  const Var hv = push(std::move(hn));
  Node cn = make_node(Op::slice, value(core).segment(h, h), {core.id});
  cn.offset = h;
  const Var cv = push(std::move(cn));
  return {hv, cv};
}

Var Tape::floor(Var x, double floor_value) {
  Node n = make_node(Op::floor, value(x).cwiseMax(floor_value), {x.id});
  n.param = floor_value;
  return push(std::move(n));
}

Var Tape::square(Var x) {
  Node n = make_node(Op::square, value(x).array().square().matrix(), {x.id});
  return push(std::move(n));
}

Var Tape::scale(Var x, double factor) {
  Node n = make_node(Op::scale, value(x) * factor, {x.id});
  n.param = factor;
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  if (value(a).size() != value(b).size()) throw UsageError("add: size mismatch");
  Node n = make_node(Op::add, value(a) + value(b), {a.id, b.id});
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  if (value(a).size() != value(b).size()) throw UsageError("sub: size mismatch");
  Node n = make_node(Op::sub, value(a) - value(b), {a.id, b.id});
  return push(std::move(n));
}

Var Tape::sum(std::span<const Var> terms) {
  if (terms.empty()) throw UsageError("sum of no terms");
  double total = 0.0;
  std::vector<int> ids;
  ids.reserve(terms.size());
  for (Var t : terms) {
    total += scalar_value(t);
    ids.push_back(t.id);
  }
  Node n = make_node(Op::sum, Vector::Constant(1, total), std::move(ids));
  n.param = 1.0;
  return push(std::move(n));
}

Var Tape::mean(std::span<const Var> terms) {
  const Var s = sum(terms);
  Node& n = nodes_[static_cast<std::size_t>(s.id)];
  n.param = 1.0 / static_cast<double>(terms.size());
  n.value *= n.param;
  return s;
}

Var Tape::gaussian_log_prob(Var mean, Var variance, double sample) {
  const double mu = scalar_value(mean);
  const double var = scalar_value(variance);
  if (!(var > 0.0)) throw UsageError("gaussian_log_prob: variance must be positive");
  const double d = sample - mu;
  const double lp = -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
  Node n = make_node(Op::log_prob, Vector::Constant(1, lp), {mean.id, variance.id});
  n.param = sample;
  return push(std::move(n));
}

Var Tape::gaussian_entropy(Var variance) {
  const double var = scalar_value(variance);
  if (!(var > 0.0)) throw UsageError("gaussian_entropy: variance must be positive");
  const double h = 0.5 * (std::log(2.0 * std::numbers::pi * var) + 1.0);
  Node n = make_node(Op::entropy, Vector::Constant(1, h), {variance.id});
  return push(std::move(n));
}

Gradients Tape::backward(Var loss) const {
  const Node& root = node(loss);
  if (root.value.size() != 1)
    throw UsageError("backward requires a scalar loss; got a var of length " +
                     std::to_string(root.value.size()));

  std::vector<Vector> adj(nodes_.size());
  adj[static_cast<std::size_t>(loss.id)] = Vector::Ones(1);
  Gradients grads;

  auto accumulate = [&](int id, const Vector& g) {
    Vector& a = adj[static_cast<std::size_t>(id)];
    if (a.size() == 0)
      a = g;
    else
      a += g;
  };

  for (int id = loss.id; id >= 0; --id) {
    const Vector& up = adj[static_cast<std::size_t>(id)];
    if (up.size() == 0) continue;
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    switch (n.op) {
      case Op::constant:
        break;
      case Op::dense: {
        const DenseLayer& layer = *n.dense;
        const Vector delta =
            up.cwiseProduct(activation_derivative(layer.activation, n.cache, n.value));
        const Vector& x = nodes_[static_cast<std::size_t>(n.inputs[0])].value;
        grads.accumulator(layer.weights).noalias() += delta * x.transpose();
        grads.accumulator(layer.biases) += delta;
        accumulate(n.inputs[0], layer.weights.value.transpose() * delta);
        break;
      }
      case Op::lstm: {
        const LstmCell& cell = *n.lstm;
        const int h = cell.hidden_size();
        const Vector& x = nodes_[static_cast<std::size_t>(n.inputs[0])].value;
        const Vector& h_prev = nodes_[static_cast<std::size_t>(n.inputs[1])].value;
        const Vector& c_prev = nodes_[static_cast<std::size_t>(n.inputs[2])].value;
        const auto i = n.cache.segment(0, h).array();
        const auto f = n.cache.segment(h, h).array();
        const auto g = n.cache.segment(2 * h, h).array();
        const auto o = n.cache.segment(3 * h, h).array();
        const Eigen::ArrayXd tanh_c = n.value.segment(h, h).array().tanh();
        const auto dh = up.segment(0, h).array();
        const Eigen::ArrayXd dc = up.segment(h, h).array() + dh * o * (1.0 - tanh_c.square());

        Vector dz(4 * h);
        dz.segment(0, h) = (dc * g * i * (1.0 - i)).matrix();
        dz.segment(h, h) = (dc * c_prev.array() * f * (1.0 - f)).matrix();
        dz.segment(2 * h, h) = (dc * i * (1.0 - g.square())).matrix();
        dz.segment(3 * h, h) = (dh * tanh_c * o * (1.0 - o)).matrix();

        grads.accumulator(cell.input_weights).noalias() += dz * x.transpose();
        grads.accumulator(cell.recurrent_weights).noalias() += dz * h_prev.transpose();
        grads.accumulator(cell.biases) += dz;
        accumulate(n.inputs[0], cell.input_weights.value.transpose() * dz);
        accumulate(n.inputs[1], cell.recurrent_weights.value.transpose() * dz);
        accumulate(n.inputs[2], (dc * f).matrix());
        break;
      }
      case Op::slice: {
        const Node& src = nodes_[static_cast<std::size_t>(n.inputs[0])];
        Vector g = Vector::Zero(src.value.size());
        g.segment(n.offset, up.size()) = up;
        accumulate(n.inputs[0], g);
        break;
      }
      case Op::floor: {
        const Vector& x = nodes_[static_cast<std::size_t>(n.inputs[0])].value;
        const double lo = n.param;
        accumulate(n.inputs[0],
                   up.binaryExpr(x, [lo](double u, double v) { return v > lo ? u : 0.0; }));
        break;
      }
      case Op::square: {
        const Vector& x = nodes_[static_cast<std::size_t>(n.inputs[0])].value;
        accumulate(n.inputs[0], 2.0 * up.cwiseProduct(x));
        break;
      }
      case Op::scale:
        accumulate(n.inputs[0], up * n.param);
        break;
      case Op::add:
        accumulate(n.inputs[0], up);
        accumulate(n.inputs[1], up);
        break;
      case Op::sub:
        accumulate(n.inputs[0], up);
        accumulate(n.inputs[1], -up);
        break;
      case Op::sum:
        for (int in : n.inputs) accumulate(in, up * n.param);
        break;
      case Op::log_prob: {
        const double mu = nodes_[static_cast<std::size_t>(n.inputs[0])].value[0];
        const double var = nodes_[static_cast<std::size_t>(n.inputs[1])].value[0];
        const double d = n.param - mu;
        accumulate(n.inputs[0], Vector::Constant(1, up[0] * d / var));
        accumulate(n.inputs[1], Vector::Constant(1, up[0] * 0.5 * (d * d / (var * var) - 1.0 / var)));
        break;
      }
      case Op::entropy: {
        const double var = nodes_[static_cast<std::size_t>(n.inputs[0])].value[0];
        accumulate(n.inputs[0], Vector::Constant(1, up[0] * 0.5 / var));
        break;
      }
    }
  }
  return grads;
}

}  // namespace arl::nnet
