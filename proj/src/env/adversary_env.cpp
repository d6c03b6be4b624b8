#include "arl/env/adversary_env.hpp"

#include "arl/error.hpp"

#include <algorithm>
#include <cmath>

namespace arl::env {

std::vector<double> friction_grid() {
  std::vector<double> grid;
  grid.reserve(25);
  for (int i = 0; i <= 24; ++i) grid.push_back(0.4 + 0.025 * i);
  return grid;
}

void EnvConfig::validate() const {
  if (!(std::isfinite(v_lead.min) && std::isfinite(v_lead.max) && v_lead.min < v_lead.max))
    throw ConfigError("env.v_lead range requires v_min < v_max");
  if (v_lead.min < 0.0) throw ConfigError("env.v_lead range must be non-negative");
  if (!(a_lead_min < 0.0 && 0.0 < a_lead_max))
    throw ConfigError("env.a_lead range requires a_lead_min < 0 < a_lead_max");
  if (episode_steps <= 0) throw ConfigError("env.episode_steps must be positive");
  if (!(initial_headway > 0.0)) throw ConfigError("env.initial_headway must be positive");
  if (!(sim.dt > 0.0)) throw ConfigError("env.dt must be positive");
  if (!(sim.headway_cap > 0.0)) throw ConfigError("env.headway_cap must be positive");
  if (!(sim.v_floor > 0.0)) throw ConfigError("env.v_floor must be positive");
}

AdversaryObservation observe(const dynamics::WorldState& world, const dynamics::SimParams& sim) {
  return {world.follower.velocity, world.follower.acceleration,
          world.lead.velocity - world.follower.velocity, dynamics::headway(world, sim)};
}

targets::FollowerObservation follower_view(const AdversaryObservation& obs) {
  return {obs.v_f, obs.v_rel, obs.t_h, obs.a_f};
}

double scale_action(double u, const EnvConfig& config) {
  const double c = std::clamp(u, -1.0, 1.0);
  return config.a_lead_min + (c + 1.0) / 2.0 * (config.a_lead_max - config.a_lead_min);
}

double reward(double t_h) {
  constexpr double kCap = 100.0;
  if (t_h <= 0.0) return kCap;
  return std::min(1.0 / t_h, kCap);
}

std::array<double, 4> normalize_obs(const AdversaryObservation& obs) {
  return {obs.v_f / 40.0, obs.a_f / 6.0, obs.v_rel / 20.0, std::min(obs.t_h, 10.0) / 10.0};
}

dynamics::WorldState reset_world(const EnvConfig& config, std::mt19937_64& rng) {
  const auto grid = friction_grid();
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  std::uniform_real_distribution<double> speed(config.v_lead.min, config.v_lead.max);
  dynamics::WorldState w;
  w.cof = grid[pick(rng)];
  const double v = speed(rng);
  w.follower = {0.0, v, 0.0};
  w.lead = {config.initial_headway * v, v, 0.0};
  w.step_index = 0;
  return w;
}

AdversaryEnv::AdversaryEnv(EnvConfig config, targets::FollowerPolicy& follower)
    : config_(config), follower_(&follower) {
  config_.validate();
}

AdversaryObservation AdversaryEnv::reset(std::mt19937_64& rng) {
  world_ = reset_world(config_, rng);
  follower_->reset();
  done_ = false;
  return observe(world_, config_.sim);
}

StepOutcome AdversaryEnv::step(double u_raw) {
  if (done_) throw UsageError("step called on a finished episode; call reset() first");

  const auto& sim = config_.sim;
  const double a_lead_cmd = scale_action(u_raw, config_);
  const AdversaryObservation before = observe(world_, sim);
  const double a_follow_cmd = follower_->command(follower_view(before));

  world_ = dynamics::step(world_, a_lead_cmd, a_follow_cmd, sim,
                          {config_.v_lead.min, config_.v_lead.max}, {});

  StepOutcome out;
  out.observation = observe(world_, sim);
  out.reward = reward(out.observation.t_h);
  out.info = {dynamics::gap(world_),      out.observation.t_h,
              world_.lead.velocity,       world_.follower.velocity,
              a_lead_cmd,                 world_.lead.acceleration,
              a_follow_cmd,               world_.follower.acceleration};
  if (dynamics::collision_check(world_)) {
    out.done = true;
    out.done_reason = DoneReason::collision;
  } else if (world_.step_index >= config_.episode_steps) {
    out.done = true;
    out.done_reason = DoneReason::timeout;
  }
  done_ = out.done;
  return out;
}

}  // namespace arl::env
