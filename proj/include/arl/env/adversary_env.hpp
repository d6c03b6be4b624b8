#pragma once

#include "arl/dynamics/dynamics.hpp"
#include "arl/targets/followers.hpp"

#include <array>
#include <random>
#include <vector>

namespace arl::env {

struct VelocityRange {
  double min = 17.0;
  double max = 30.0;
};

/// The four lead velocity ranges used in the experiment matrix.
inline constexpr std::array<VelocityRange, 4> kStandardVelocityRanges{
    VelocityRange{17, 30}, VelocityRange{12, 35}, VelocityRange{12, 30}, VelocityRange{17, 35}};

/// {0.4, 0.425, ..., 1.0}
std::vector<double> friction_grid();

struct EnvConfig {
  VelocityRange v_lead{17.0, 30.0};
  double a_lead_min = -6.0;
  double a_lead_max = 2.0;
  long episode_steps = 7500;        // 5 min at 40 ms
  double initial_headway = 2.0;     // s, both vehicles start at equal speed
  dynamics::SimParams sim;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

struct AdversaryObservation {
  double v_f = 0.0;
  double a_f = 0.0;
  double v_rel = 0.0;
  double t_h = 0.0;
};

enum class DoneReason { none, collision, timeout };

struct StepInfo {
  double gap = 0.0;
  double t_h = 0.0;
  double v_lead = 0.0;
  double v_follow = 0.0;
  double a_lead_cmd = 0.0;
  double a_lead_applied = 0.0;
  double a_follow_cmd = 0.0;
  double a_follow_applied = 0.0;
};

struct StepOutcome {
  AdversaryObservation observation;
  double reward = 0.0;
  bool done = false;
  DoneReason done_reason = DoneReason::none;
  StepInfo info;
};

AdversaryObservation observe(const dynamics::WorldState& world, const dynamics::SimParams& sim);
targets::FollowerObservation follower_view(const AdversaryObservation& obs);

/// Clips u to [-1, 1] and maps it affinely onto [a_lead_min, a_lead_max].
double scale_action(double u, const EnvConfig& config);

/// min(1 / t_h, 100); t_h = 0 gives the cap.
double reward(double t_h);

/// (v_f / 40, a_f / 6, v_rel / 20, min(t_h, 10) / 10)
std::array<double, 4> normalize_obs(const AdversaryObservation& obs);

/// Episode start: cof uniform on the grid, both speeds equal and uniform on the
/// lead range, gap = initial_headway * speed.
dynamics::WorldState reset_world(const EnvConfig& config, std::mt19937_64& rng);

/// One adversary-vs-follower episode. The follower is borrowed and must outlive the env.
class AdversaryEnv {
 public:
  AdversaryEnv(EnvConfig config, targets::FollowerPolicy& follower);

  AdversaryObservation reset(std::mt19937_64& rng);
  /// Throws UsageError once the episode has finished.
  StepOutcome step(double u_raw);

  const dynamics::WorldState& world() const { return world_; }
  const EnvConfig& config() const { return config_; }
  bool done() const { return done_; }

 private:
  EnvConfig config_;
  targets::FollowerPolicy* follower_;
  dynamics::WorldState world_;
  bool done_ = true;
};

}  // namespace arl::env
