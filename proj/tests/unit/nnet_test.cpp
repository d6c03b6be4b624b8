#include "arl/a2c/a2c.hpp"
#include "arl/nnet/network.hpp"
#include "arl/nnet/rmsprop.hpp"
#include "arl/nnet/tape.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

namespace fs = std::filesystem;
using namespace arl;
using namespace arl::nnet;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "arl_nnet_test";
  fs::create_directories(dir);
  return dir / name;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<Matrix> tape_gradients(Network& net, const Gradients& g) {
  std::vector<Matrix> out;
  for (Parameter* p : net.parameters()) out.push_back(g[*p]);
  return out;
}

}  // namespace

TEST(Dense, IdentityLinear) {
  DenseLayer layer("d", 2, 2, Activation::linear);
  layer.weights.value = Matrix::Identity(2, 2);
  const Vector y = dense_forward(layer, vec({1.0, 2.0}));
  EXPECT_EQ(y, vec({1.0, 2.0}));
}

TEST(Dense, Relu6Clamps) {
  EXPECT_EQ(activate(Activation::relu6, vec({-1.0, 3.0, 7.0})), vec({0.0, 3.0, 6.0}));
}

TEST(Dense, SoftplusAtZero) {
  EXPECT_NEAR(activate(Activation::softplus, vec({0.0}))[0], std::log(2.0), 1e-15);
}

TEST(Dense, DimensionMismatchIsConfigError) {
  DenseLayer layer("d", 3, 2, Activation::linear);
  EXPECT_THROW(dense_forward(layer, vec({1.0, 2.0})), ConfigError);
  Tape tape;
  EXPECT_THROW(tape.dense(layer, tape.constant(vec({1.0}))), ConfigError);
}

TEST(Dense, ActivationRangesOnRandomInputs) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-50.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector pre = Vector::NullaryExpr(64, [&] { return d(rng); });
    const Vector r = activate(Activation::relu6, pre);
    const Vector s = activate(Activation::softplus, pre);
    const Vector t = activate(Activation::tanh, pre * 0.05);
    for (Eigen::Index i = 0; i < pre.size(); ++i) {
      EXPECT_GE(r[i], 0.0);
      EXPECT_LE(r[i], 6.0);
      EXPECT_GT(s[i], 0.0);
      EXPECT_GT(t[i], -1.0);
      EXPECT_LT(t[i], 1.0);
    }
  }
}

TEST(Dense, InitializationBounds) {
  std::mt19937_64 rng(3);
  DenseLayer layer("d", 4, 50, Activation::relu6);
  layer.initialize(rng);
  const double limit = std::sqrt(6.0 / 54.0);
  EXPECT_LE(layer.weights.value.cwiseAbs().maxCoeff(), limit);
  EXPECT_TRUE(layer.biases.value.isZero(0.0));
}

TEST(Lstm, ZeroParametersGiveZeroOutput) {
  LstmCell cell("c", 3, 4);
  RecurrentState s = RecurrentState::zeros(4);
  const Vector out = lstm_step(cell, vec({0.3, -2.0, 5.0}), s);
  EXPECT_TRUE(out.isZero(0.0));
  EXPECT_TRUE(s.is_zero());
}

TEST(Lstm, SaturatedForgetGatePreservesCell) {
  LstmCell cell("c", 2, 2);
  cell.biases.value.block(2, 0, 2, 1).setConstant(1e3);   // forget
  cell.biases.value.block(0, 0, 2, 1).setConstant(-1e3);  // input closed
  RecurrentState s;
  s.hidden = vec({0.1, -0.2});
  s.cell = vec({0.7, -1.4});
  lstm_step(cell, vec({3.0, -4.0}), s);
  EXPECT_DOUBLE_EQ(s.cell[0], 0.7);
  EXPECT_DOUBLE_EQ(s.cell[1], -1.4);
}

TEST(Lstm, TwoUnitStepMatchesHandEvaluation) {
  LstmCell cell("c", 2, 2);
  cell.input_weights.value << 0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 0.7, -0.8, 0.9, 0.15, -0.25, 0.35,
      0.45, -0.55, 0.65, 0.05;
  cell.recurrent_weights.value << 0.2, 0.1, -0.3, 0.25, 0.15, -0.4, 0.05, 0.5, -0.6, 0.3, 0.35,
      -0.15, 0.1, 0.2, -0.45, 0.55;
  cell.biases.value << 0.01, -0.02, 1.0, 1.0, 0.03, -0.04, 0.05, -0.06;
  RecurrentState s;
  s.hidden = vec({0.2, -0.6});
  s.cell = vec({0.5, -0.25});
  const Vector h = lstm_step(cell, vec({0.8, -1.3}), s);
  // Gate equations evaluated separately with scalar arithmetic.
  EXPECT_NEAR(h[0], 0.28367773055809004, 1e-12);
  EXPECT_NEAR(h[1], -0.19221410748522197, 1e-12);
  EXPECT_NEAR(s.cell[0], 0.4064570860210601, 1e-12);
  EXPECT_NEAR(s.cell[1], -0.41096782219118916, 1e-12);
  EXPECT_EQ(s.hidden, h);
}

TEST(Lstm, DimensionMismatchIsConfigError) {
  LstmCell cell("c", 2, 3);
  RecurrentState s = RecurrentState::zeros(3);
  EXPECT_THROW(lstm_step(cell, vec({1.0}), s), ConfigError);
  RecurrentState bad = RecurrentState::zeros(2);
  EXPECT_THROW(lstm_step(cell, vec({1.0, 2.0}), bad), ConfigError);
}

TEST(Lstm, TapedStepMatchesInference) {
  std::mt19937_64 rng(11);
  LstmCell cell("c", 3, 4);
  cell.initialize(rng);
  RecurrentState s;
  s.hidden = vec({0.1, 0.2, -0.3, 0.4});
  s.cell = vec({-0.5, 0.6, 0.7, -0.8});
  Tape tape;
  const auto out = tape.lstm(cell, tape.constant(vec({1.0, -1.0, 0.5})), tape.constant(s.hidden),
                             tape.constant(s.cell));
  lstm_step(cell, vec({1.0, -1.0, 0.5}), s);
  EXPECT_EQ(tape.value(out.hidden), s.hidden);
  EXPECT_EQ(tape.value(out.cell), s.cell);
}

TEST(Backward, LinearCase) {
  DenseLayer layer("w", 1, 1, Activation::linear);
  layer.weights.value(0, 0) = 0.7;
  Tape tape;
  const Var loss = tape.dense(layer, tape.scalar(3.0));
  const Gradients g = tape.backward(loss);
  EXPECT_DOUBLE_EQ(g[layer.weights](0, 0), 3.0);
  EXPECT_DOUBLE_EQ(g[layer.biases](0, 0), 1.0);
}

TEST(Backward, UnusedParameterHasZeroGradient) {
  DenseLayer used("a", 2, 1, Activation::linear);
  DenseLayer unused("b", 2, 1, Activation::linear);
  used.weights.value << 1.0, 2.0;
  Tape tape;
  const Gradients g = tape.backward(tape.dense(used, tape.constant(vec({1.0, 1.0}))));
  EXPECT_FALSE(g.touched(unused.weights));
  EXPECT_TRUE(g[unused.weights].isZero(0.0));
  EXPECT_EQ(g[unused.weights].rows(), 1);
  EXPECT_EQ(g[unused.weights].cols(), 2);
}

TEST(Backward, NonScalarLossIsUsageError) {
  Tape tape;
  const Var v = tape.constant(vec({1.0, 2.0}));
  EXPECT_THROW(tape.backward(v), UsageError);
}

// Finite-difference property tests. Each draw randomizes the parameters and
// inputs; draws that land within 1e-4 of a relu6 kink are replaced because the
// derivative is undefined there.

TEST(GradientCheck, DenseChainAllActivations) {
  int accepted = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; accepted < 100; ++seed) {
    std::mt19937_64 rng(seed);
    Network net;
    net.add(DenseLayer("layer0", 4, 6, Activation::tanh));
    net.add(DenseLayer("layer1", 6, 5, Activation::softplus));
    net.add(DenseLayer("layer2", 5, 3, Activation::relu6));
    net.add(DenseLayer("layer3", 3, 2, Activation::linear));
    oracle::randomize(net, rng, 0.8);
    const Vector x = Vector::NullaryExpr(4, [&] { return std::uniform_real_distribution<double>(-1, 1)(rng); });

    const auto& l2 = net.as<DenseLayer>(2);
    Vector h = x;
    for (std::size_t k = 0; k < 2; ++k) h = dense_forward(net.as<DenseLayer>(k), h);
    const Vector pre = l2.weights.value * h + l2.biases.value.col(0);
    if ((pre.array().abs() < 1e-4).any() || ((pre.array() - 6.0).abs() < 1e-4).any()) continue;

    auto plain = [&] {
      std::vector<RecurrentState> st;
      const Vector y = net.run_sequential(x, st);
      return 0.5 * y.squaredNorm() + 0.3 * y[0];
    };
    // Scalar picks of the 2-vector output keep the loss on scalar ops.
    Tape t2;
    Var y = t2.constant(x);
    for (std::size_t k = 0; k < net.layer_count(); ++k) y = t2.dense(net.as<DenseLayer>(k), y);
    DenseLayer pick0("pick0", 2, 1, Activation::linear);
    pick0.weights.value << 1.0, 0.0;
    DenseLayer pick1("pick1", 2, 1, Activation::linear);
    pick1.weights.value << 0.0, 1.0;
    const Var y0 = t2.dense(pick0, y);
    const Var y1 = t2.dense(pick1, y);
    const Var l = t2.add(t2.scale(t2.add(t2.square(y0), t2.square(y1)), 0.5), t2.scale(y0, 0.3));
    EXPECT_NEAR(t2.scalar_value(l), plain(), 1e-12);

    const auto analytic = tape_gradients(net, t2.backward(l));
    const auto numeric = oracle::finite_difference_gradients(net, plain);
    worst = std::max(worst, oracle::max_relative_error(analytic, numeric));
    ++accepted;
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(GradientCheck, LstmThroughFiveSteps) {
  int accepted = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; accepted < 100; ++seed) {
    std::mt19937_64 rng(seed);
    Network net;
    net.add(LstmCell("layer0", 3, 4));
    net.add(DenseLayer("layer1", 4, 1, Activation::linear));
    oracle::randomize(net, rng, 0.9);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<Vector> xs;
    for (int t = 0; t < 5; ++t) xs.push_back(Vector::NullaryExpr(3, [&] { return d(rng); }));
    RecurrentState s0;
    s0.hidden = Vector::NullaryExpr(4, [&] { return 0.5 * d(rng); });
    s0.cell = Vector::NullaryExpr(4, [&] { return d(rng); });

    auto plain = [&] {
      RecurrentState s = s0;
      double total = 0.0;
      for (const Vector& x : xs) {
        const Vector h = lstm_step(net.as<LstmCell>(0), x, s);
        const double y = dense_forward(net.as<DenseLayer>(1), h)[0];
        total += y * y;
      }
      return total / 5.0;
    };

    Tape tape;
    Var h = tape.constant(s0.hidden);
    Var c = tape.constant(s0.cell);
    std::vector<Var> terms;
    for (const Vector& x : xs) {
      const auto out = tape.lstm(net.as<LstmCell>(0), tape.constant(x), h, c);
      h = out.hidden;
      c = out.cell;
      terms.push_back(tape.square(tape.dense(net.as<DenseLayer>(1), h)));
    }
    const Var loss = tape.mean(terms);
    EXPECT_NEAR(tape.scalar_value(loss), plain(), 1e-12);

    const auto analytic = tape_gradients(net, tape.backward(loss));
    const auto numeric = oracle::finite_difference_gradients(net, plain);
    worst = std::max(worst, oracle::max_relative_error(analytic, numeric));
    ++accepted;
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(GradientCheck, CriticLoss) {
  int accepted = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; accepted < 100; ++seed) {
    std::mt19937_64 rng(seed);
    a2c::CriticNetwork critic(a2c::CriticShape{4, 8, 2});
    oracle::randomize(critic.network(), rng, 0.6);
    const a2c::Rollout r = oracle::random_rollout(rng, 6, 1, seed % 2 == 0);
    if (oracle::critic_near_kink(critic, r)) continue;
    const auto adv = a2c::n_step_advantages(r, 0.99);
    std::vector<double> targets(adv.size());
    for (std::size_t t = 0; t < adv.size(); ++t) targets[t] = adv[t] + r.steps[t].value;

    Tape tape;
    const Var loss = a2c::critic_loss(tape, critic, r, adv);
    EXPECT_NEAR(tape.scalar_value(loss), oracle::critic_loss_reference(critic, r, targets), 1e-12);
    const auto analytic = tape_gradients(critic.network(), tape.backward(loss));
    const auto numeric = oracle::finite_difference_gradients(
        critic.network(), [&] { return oracle::critic_loss_reference(critic, r, targets); });
    worst = std::max(worst, oracle::max_relative_error(analytic, numeric));
    ++accepted;
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(GradientCheck, ActorLossFiveStepBptt) {
  int accepted = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; accepted < 100; ++seed) {
    std::mt19937_64 rng(seed);
    a2c::ActorNetwork actor(a2c::ActorShape{4, 8, 3, 4}, 1e-4);
    oracle::randomize(actor.network(), rng, 0.6);
    const a2c::Rollout r = oracle::random_rollout(rng, 5, 4, false);
    if (oracle::actor_near_kink(actor, r)) continue;
    const auto adv = a2c::n_step_advantages(r, 0.99);
    const double beta = 0.05;  // large enough that the entropy path shows up in the gradient

    Tape tape;
    const Var loss = a2c::actor_loss(tape, actor, r, adv, beta);
    EXPECT_NEAR(tape.scalar_value(loss), oracle::actor_loss_reference(actor, r, adv, beta), 1e-12);
    const auto analytic = tape_gradients(actor.network(), tape.backward(loss));
    const auto numeric = oracle::finite_difference_gradients(
        actor.network(), [&] { return oracle::actor_loss_reference(actor, r, adv, beta); });
    worst = std::max(worst, oracle::max_relative_error(analytic, numeric));
    ++accepted;
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(GradientCheck, FullSizeActorAndCritic) {
  std::mt19937_64 rng(2024);
  a2c::ActorNetwork actor;
  a2c::CriticNetwork critic;
  actor.network().initialize(rng);
  critic.network().initialize(rng);
  a2c::Rollout r = oracle::random_rollout(rng, 5, actor.lstm_units(), false);
  while (oracle::actor_near_kink(actor, r) || oracle::critic_near_kink(critic, r))
    r = oracle::random_rollout(rng, 5, actor.lstm_units(), false);
  const auto adv = a2c::n_step_advantages(r, 0.99);
  std::vector<double> targets(adv.size());
  for (std::size_t t = 0; t < adv.size(); ++t) targets[t] = adv[t] + r.steps[t].value;

  Tape ta;
  const auto ga = tape_gradients(actor.network(), ta.backward(a2c::actor_loss(ta, actor, r, adv, 1e-4)));
  const auto na = oracle::finite_difference_gradients(
      actor.network(), [&] { return oracle::actor_loss_reference(actor, r, adv, 1e-4); });
  EXPECT_LT(oracle::max_relative_error(ga, na), 1e-4);

  Tape tc;
  const auto gc = tape_gradients(critic.network(), tc.backward(a2c::critic_loss(tc, critic, r, adv)));
  const auto nc = oracle::finite_difference_gradients(
      critic.network(), [&] { return oracle::critic_loss_reference(critic, r, targets); });
  EXPECT_LT(oracle::max_relative_error(gc, nc), 1e-4);
}

TEST(GradientCheck, WindowOfOneEqualsSingleStep) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    a2c::ActorNetwork actor(a2c::ActorShape{4, 8, 3, 4}, 1e-4);
    oracle::randomize(actor.network(), rng, 0.6);
    a2c::Rollout two = oracle::random_rollout(rng, 2, 4, false);
    a2c::Rollout one = two;
    one.steps.resize(1);
    const std::vector<double> adv_one{1.7};
    const std::vector<double> adv_two{1.7, 0.0};

    Tape t1;
    const auto g1 = tape_gradients(actor.network(), t1.backward(a2c::actor_loss(t1, actor, one, adv_one, 0.0)));
    Tape t2;
    const auto g2 = tape_gradients(actor.network(), t2.backward(a2c::actor_loss(t2, actor, two, adv_two, 0.0)));
    for (std::size_t k = 0; k < g1.size(); ++k)
      EXPECT_LT((g1[k] - 2.0 * g2[k]).cwiseAbs().maxCoeff(), 1e-12) << "block " << k;
  }
}

TEST(RmsProp, WorkedStep) {
  Parameter p{"p", Matrix::Zero(1, 1)};
  RmsProp opt({&p}, RmsPropConfig{0.9, 1e-10, 0.0});
  Gradients g;
  g.accumulator(p)(0, 0) = 1.0;
  opt.step(g, 0.01);
  EXPECT_NEAR(opt.accumulator(0)(0, 0), 0.1, 1e-15);
  // -0.01 / (sqrt(0.1) + 1e-10)
  EXPECT_NEAR(p.value(0, 0), -0.031622776591889, 1e-12);
}

TEST(RmsProp, ZeroGradientIsFixedPointAndDecaysAccumulator) {
  Parameter p{"p", Matrix::Constant(2, 2, 0.5)};
  RmsProp opt({&p}, RmsPropConfig{});
  Gradients g;
  g.accumulator(p).setConstant(2.0);
  opt.step(g, 0.1);
  const Matrix after_first = p.value;
  const Matrix acc = opt.accumulator(0);
  Gradients zero;
  opt.step(zero, 0.1);
  EXPECT_EQ(p.value, after_first);
  EXPECT_TRUE(opt.accumulator(0).isApprox(acc * 0.9, 1e-15));
}

TEST(RmsProp, SecondIdenticalStepIsSmaller) {
  Parameter p{"p", Matrix::Zero(1, 1)};
  RmsProp opt({&p}, RmsPropConfig{});
  Gradients g;
  g.accumulator(p)(0, 0) = 1.0;
  opt.step(g, 0.01);
  const double first = -p.value(0, 0);
  opt.step(g, 0.01);
  const double second = -p.value(0, 0) - first;
  EXPECT_GT(first, second);
  EXPECT_GT(second, 0.0);
}

TEST(RmsProp, AccumulatorNonNegativeOnRandomGradients) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 3.0);
  Parameter p{"p", Matrix::Zero(3, 3)};
  RmsProp opt({&p}, RmsPropConfig{});
  for (int i = 0; i < 500; ++i) {
    Gradients g;
    g.accumulator(p) = Matrix::NullaryExpr(3, 3, [&] { return n(rng); });
    opt.step(g, 1e-3);
    EXPECT_GE(opt.accumulator(0).minCoeff(), 0.0);
  }
}

TEST(RmsProp, ShapeMismatchAndBadConfig) {
  Parameter p{"p", Matrix::Zero(2, 1)};
  Parameter other{"q", Matrix::Zero(3, 1)};
  RmsProp opt({&p}, RmsPropConfig{});
  Gradients g;
  g.accumulator(p);
  g.accumulator(p) = Matrix::Zero(3, 1);
  EXPECT_THROW(opt.step(g, 0.1), ConfigError);
  EXPECT_THROW(RmsProp({&p}, RmsPropConfig{1.0, 1e-10, 0.0}), ConfigError);
  EXPECT_THROW(RmsProp({&p}, RmsPropConfig{0.9, 0.0, 0.0}), ConfigError);
}

TEST(WeightFile, RoundTripIsExact) {
  std::mt19937_64 rng(99);
  a2c::ActorNetwork actor;
  oracle::randomize(actor.network(), rng, 1.0 / 3.0);
  const fs::path path = temp_file("actor.nnet");
  save_weights(actor.network(), path);
  const Network loaded = load_weights(path);
  EXPECT_EQ(loaded.architecture(), actor.network().architecture());
  const auto a = actor.network().parameters();
  const auto b = loaded.parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k]->name, b[k]->name);
    EXPECT_EQ(a[k]->value, b[k]->value) << a[k]->name;
  }

  a2c::ActorNetwork target;
  load_weights_into(path, target.network());
  for (std::size_t k = 0; k < a.size(); ++k)
    EXPECT_EQ(target.network().parameters()[k]->value, a[k]->value);
}

TEST(WeightFile, HeaderLayout) {
  Network net;
  net.add(DenseLayer("layer0", 2, 1, Activation::tanh));
  const fs::path path = temp_file("tiny.nnet");
  save_weights(net, path);
  std::ifstream in(path);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  EXPECT_EQ(l1, "NNETv1");
  EXPECT_EQ(l2, "dense:2:1:tanh");
  EXPECT_EQ(l3.rfind("layer0.weights 2 ", 0), 0u);
}

TEST(WeightFile, TruncatedFileFails) {
  std::mt19937_64 rng(1);
  a2c::CriticNetwork critic;
  critic.network().initialize(rng);
  const fs::path path = temp_file("critic.nnet");
  save_weights(critic.network(), path);
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), {});
  in.close();
  const fs::path cut = temp_file("critic_cut.nnet");
  std::ofstream(cut) << content.substr(0, content.size() / 2);
  EXPECT_THROW(load_weights(cut), WeightFileError);
}

TEST(WeightFile, MalformedHeaderNamesLine) {
  const fs::path path = temp_file("bad.nnet");
  std::ofstream(path) << "NNETv0\ndense:1:1:linear\n";
  try {
    load_weights(path);
    FAIL() << "expected WeightFileError";
  } catch (const WeightFileError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}

TEST(WeightFile, HiddenSizeMustMatch) {
  std::mt19937_64 rng(4);
  a2c::ActorNetwork sixteen(a2c::ActorShape{4, 50, 3, 16});
  sixteen.network().initialize(rng);
  const fs::path path = temp_file("h16.nnet");
  save_weights(sixteen.network(), path);

  a2c::ActorNetwork same(a2c::ActorShape{4, 50, 3, 16});
  EXPECT_NO_THROW(load_weights_into(path, same.network()));
  a2c::ActorNetwork eight(a2c::ActorShape{4, 50, 3, 8});
  try {
    load_weights_into(path, eight.network());
    FAIL() << "expected WeightFileError";
  } catch (const WeightFileError& e) {
    EXPECT_NE(std::string(e.what()).find("dimension"), std::string::npos) << e.what();
  }
}
