#include "arl/error.hpp"
#include "arl/targets/followers.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace arl;
using namespace arl::targets;

namespace {

FollowerObservation obs(double v_f, double v_rel, double t_h, double a_f = 0.0) {
  return FollowerObservation{v_f, v_rel, t_h, a_f};
}

FollowerObservation random_obs(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> v(0.0, 45.0);
  std::uniform_real_distribution<double> rel(-25.0, 25.0);
  std::uniform_real_distribution<double> th(0.0, 100.0);
  std::uniform_real_distribution<double> a(-6.0, 2.0);
  return obs(v(rng), rel(rng), th(rng) * th(rng) / 100.0, a(rng));
}

nnet::Network small_follower(int arity, std::mt19937_64& rng) {
  nnet::Network net;
  net.add(nnet::DenseLayer("layer0", arity, 8, nnet::Activation::relu6));
  net.add(nnet::LstmCell("layer1", 8, 4));
  net.add(nnet::DenseLayer("layer2", 4, 1, nnet::Activation::tanh));
  net.initialize(rng);
  return net;
}

}  // namespace

TEST(Naive, Examples) {
  EXPECT_EQ(naive_tracker(obs(25.0, 0.0, 2.0), {}), 0.0);
  // Large headway while the lead brakes hard: still accelerates.
  EXPECT_GT(naive_tracker(obs(25.0, -8.0, 4.0), {}), 0.0);
  NaiveTrackerParams p;
  p.headway_gain = 2.0;
  EXPECT_DOUBLE_EQ(naive_tracker(obs(25.0, 0.0, 1.0), p), -2.0);
}

TEST(Naive, IgnoresRelativeSpeed) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> rel(-30.0, 30.0);
  NaiveTracker f;
  for (int i = 0; i < 2000; ++i) {
    FollowerObservation o = random_obs(rng);
    const double base = f.command(o);
    o.v_rel = rel(rng);
    EXPECT_EQ(f.command(o), base);
  }
}

TEST(Naive, RejectsInvertedLimits) {
  NaiveTrackerParams p;
  p.brake_limit = 1.0;
  EXPECT_THROW(NaiveTracker{p}, ConfigError);
}

TEST(Robust, Examples) {
  EXPECT_EQ(robust_follower(obs(25.0, 0.0, 2.0), {}), 0.0);
  // gap 10 m closing at 5 m/s: TTC 2 s < 3 s
  EXPECT_EQ(robust_follower(obs(20.0, -5.0, 0.5), {}), -6.0);
  // gap 50 m closing at 3 m/s (TTC 16.7 s): 0.25*0.5*20 - 0.8*3
  EXPECT_NEAR(robust_follower(obs(20.0, -3.0, 2.5), {}), 0.1, 1e-12);
}

TEST(Robust, EmergencyOverrideProperty) {
  std::mt19937_64 rng(2);
  const RobustFollowerParams p;
  int overrides = 0;
  for (int i = 0; i < 20000; ++i) {
    const FollowerObservation o = random_obs(rng);
    const double gap = o.t_h * o.v_f;
    const double closing = -o.v_rel;
    if (closing > 0.0 && gap / closing < p.emergency_ttc) {
      EXPECT_EQ(robust_follower(o, p), p.max_brake);
      ++overrides;
    }
  }
  EXPECT_GT(overrides, 100);
}

TEST(Robust, RejectsBadParams) {
  RobustFollowerParams p;
  p.emergency_ttc = 0.0;
  EXPECT_THROW(RobustFollower{p}, ConfigError);
  p = {};
  p.max_brake = 0.5;
  EXPECT_THROW(RobustFollower{p}, ConfigError);
}

TEST(Followers, OutputsStayInCommandRange) {
  std::mt19937_64 rng(3);
  NaiveTracker naive;
  RobustFollower robust;
  NetworkFollower net(small_follower(4, rng));
  for (int i = 0; i < 5000; ++i) {
    const FollowerObservation o = random_obs(rng);
    for (FollowerPolicy* f : {static_cast<FollowerPolicy*>(&naive),
                              static_cast<FollowerPolicy*>(&robust),
                              static_cast<FollowerPolicy*>(&net)}) {
      const double a = f->command(o);
      EXPECT_GE(a, kCommandMin) << f->name();
      EXPECT_LE(a, kCommandMax) << f->name();
    }
  }
}

TEST(MapUnit, Endpoints) {
  EXPECT_EQ(map_unit_to_command(-1.0), -6.0);
  EXPECT_EQ(map_unit_to_command(1.0), 2.0);
  EXPECT_EQ(map_unit_to_command(0.0), -2.0);
  EXPECT_EQ(map_unit_to_command(7.0), 2.0);
}

TEST(NetworkFollower, ZeroWeightsGiveMidpoint) {
  nnet::Network net;
  net.add(nnet::DenseLayer("layer0", 3, 5, nnet::Activation::relu6));
  net.add(nnet::DenseLayer("layer1", 5, 1, nnet::Activation::tanh));
  NetworkFollower f(std::move(net));
  EXPECT_EQ(f.input_arity(), 3);
  EXPECT_EQ(f.command(obs(25.0, -2.0, 1.5)), -2.0);
}

TEST(NetworkFollower, RoundTripGivesIdenticalOutputs) {
  std::mt19937_64 rng(4);
  for (int arity : {3, 4}) {
    NetworkFollower original(small_follower(arity, rng));
    const auto path = std::filesystem::temp_directory_path() /
                      ("arl_follower_" + std::to_string(arity) + ".nnet");
    nnet::save_weights(original.network(), path);
    NetworkFollower loaded = NetworkFollower::from_file(path);
    original.reset();
    loaded.reset();
    for (int i = 0; i < 1000; ++i) {
      const FollowerObservation o = random_obs(rng);
      ASSERT_EQ(original.command(o), loaded.command(o));
    }
  }
}

TEST(NetworkFollower, ResetClearsRecurrentState) {
  std::mt19937_64 rng(5);
  NetworkFollower f(small_follower(4, rng));
  const FollowerObservation o = obs(20.0, 1.0, 2.2, 0.5);
  const double first = f.command(o);
  for (int i = 0; i < 10; ++i) f.command(obs(30.0, -4.0, 0.8, -3.0));
  f.reset();
  EXPECT_EQ(f.command(o), first);
}

TEST(NetworkFollower, ArityAndOutputChecked) {
  nnet::Network five;
  five.add(nnet::DenseLayer("layer0", 5, 1, nnet::Activation::tanh));
  EXPECT_THROW(NetworkFollower{std::move(five)}, ConfigError);
  nnet::Network two_out;
  two_out.add(nnet::DenseLayer("layer0", 4, 2, nnet::Activation::tanh));
  EXPECT_THROW(NetworkFollower{std::move(two_out)}, ConfigError);
}
