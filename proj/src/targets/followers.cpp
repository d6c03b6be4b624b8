#include "arl/targets/followers.hpp"

#include "arl/error.hpp"

#include <algorithm>
#include <cmath>

namespace arl::targets {

double naive_tracker(const FollowerObservation& obs, const NaiveTrackerParams& p) {
  const double a =
      std::clamp(p.headway_gain * (obs.t_h - p.target_headway), p.brake_limit, p.accel_limit);
  return std::clamp(a, kCommandMin, kCommandMax);
}

double robust_follower(const FollowerObservation& obs, const RobustFollowerParams& p) {
  constexpr double kClosingEps = 1e-6;
  const double gap = obs.t_h * obs.v_f;
  const double ttc = gap / std::max(-obs.v_rel, kClosingEps);
  if (ttc < p.emergency_ttc) return std::clamp(p.max_brake, kCommandMin, kCommandMax);
  const double a = p.gap_gain * (obs.t_h - p.target_headway) * obs.v_f + p.speed_gain * obs.v_rel;
  return std::clamp(a, kCommandMin, kCommandMax);
}

double map_unit_to_command(double y) {
  const double u = std::clamp(y, -1.0, 1.0);
  return kCommandMin + (u + 1.0) / 2.0 * (kCommandMax - kCommandMin);
}

NaiveTracker::NaiveTracker(NaiveTrackerParams p) : params_(p) {
  if (!(p.brake_limit <= 0.0 && 0.0 <= p.accel_limit))
    throw ConfigError("naive tracker requires brake_limit <= 0 <= accel_limit");
}

RobustFollower::RobustFollower(RobustFollowerParams p) : params_(p) {
  if (!(p.emergency_ttc > 0.0)) throw ConfigError("robust follower requires emergency_ttc > 0");
  if (!(p.max_brake <= 0.0)) throw ConfigError("robust follower requires max_brake <= 0");
}

NetworkFollower::NetworkFollower(nnet::Network network) : network_(std::move(network)) {
  const int arity = network_.input_size();
  if (arity != 3 && arity != 4)
    throw ConfigError("network follower must consume 3 or 4 inputs, architecture declares " +
                      std::to_string(arity));
  if (network_.output_size() != 1)
    throw ConfigError("network follower must have a single output, architecture declares " +
                      std::to_string(network_.output_size()));
  states_ = network_.initial_states();
}

NetworkFollower NetworkFollower::from_file(const std::filesystem::path& path) {
  return NetworkFollower(nnet::load_weights(path));
}

double NetworkFollower::command(const FollowerObservation& obs) {
  const double th = std::min(obs.t_h, 10.0) / 10.0;
  nnet::Vector x(network_.input_size());
  if (x.size() == 3)
    x << obs.v_f / 40.0, obs.v_rel / 20.0, th;
  else
    x << obs.v_f / 40.0, obs.a_f / 6.0, obs.v_rel / 20.0, th;
  const nnet::Vector y = network_.run_sequential(x, states_);
  return map_unit_to_command(y[0]);
}

void NetworkFollower::reset() { states_ = network_.initial_states(); }

}  // namespace arl::targets
