#pragma once

#include "arl/nnet/network.hpp"

#include <memory>
#include <string>

namespace arl::targets {

/// What a follower under test gets to see. Nothing else about the world or
/// the adversary is reachable through the policy interface.
struct FollowerObservation {
  double v_f = 0.0;    // m/s
  double v_rel = 0.0;  // m/s, lead minus follower
  double t_h = 0.0;    // s
  double a_f = 0.0;    // m/s^2
};

inline constexpr double kCommandMin = -6.0;
inline constexpr double kCommandMax = 2.0;

class FollowerPolicy {
 public:
  virtual ~FollowerPolicy() = default;
  /// Acceleration command in [kCommandMin, kCommandMax] m/s^2.
  virtual double command(const FollowerObservation& obs) = 0;
  /// Clears internal state; called at every episode start.
  virtual void reset() {}
  virtual std::string name() const = 0;
};

struct NaiveTrackerParams {
  double target_headway = 2.0;
  double headway_gain = 1.5;
  double accel_limit = 2.0;
  double brake_limit = -6.0;
};

struct RobustFollowerParams {
  double target_headway = 2.0;
  double gap_gain = 0.25;
  double speed_gain = 0.8;
  double emergency_ttc = 3.0;  // s
  double max_brake = -6.0;
};

/// Proportional on headway error only: blind to closing speed, so it keeps
/// accelerating while t_h > target even when the lead is braking.
double naive_tracker(const FollowerObservation& obs, const NaiveTrackerParams& p);

/// Constant-time-gap law
///   a = gap_gain * (t_h - target) * v_f + speed_gain * v_rel
/// replaced by max_brake whenever gap / max(-v_rel, eps) < emergency_ttc.
/// Output clamped to [-6, 2].
double robust_follower(const FollowerObservation& obs, const RobustFollowerParams& p);

/// Maps a tanh-range output to [-6, 2]: a = -6 + (y + 1) / 2 * 8, y clipped to [-1, 1].
double map_unit_to_command(double y);

class NaiveTracker final : public FollowerPolicy {
 public:
  explicit NaiveTracker(NaiveTrackerParams p = {});
  double command(const FollowerObservation& obs) override { return naive_tracker(obs, params_); }
  std::string name() const override { return "naive"; }
  const NaiveTrackerParams& params() const { return params_; }

 private:
  NaiveTrackerParams params_;
};

class RobustFollower final : public FollowerPolicy {
 public:
  explicit RobustFollower(RobustFollowerParams p = {});
  double command(const FollowerObservation& obs) override { return robust_follower(obs, params_); }
  std::string name() const override { return "robust"; }
  const RobustFollowerParams& params() const { return params_; }

 private:
  RobustFollowerParams params_;
};

/// Neural follower loaded from an NNETv1 file. The first layer's input size
/// selects the observation layout: 3 -> [v_f, v_rel, t_h], 4 -> [v_f, a_f, v_rel, t_h].
/// Inputs are scaled the same way as the adversary's (v/40, a/6, v_rel/20, min(t_h,10)/10);
/// the final layer must have one output.
class NetworkFollower final : public FollowerPolicy {
 public:
  explicit NetworkFollower(nnet::Network network);
  static NetworkFollower from_file(const std::filesystem::path& path);

  double command(const FollowerObservation& obs) override;
  void reset() override;
  std::string name() const override { return "network"; }

  int input_arity() const { return network_.input_size(); }
  const nnet::Network& network() const { return network_; }

 private:
  nnet::Network network_;
  std::vector<nnet::RecurrentState> states_;
};

}  // namespace arl::targets
