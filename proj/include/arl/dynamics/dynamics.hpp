#pragma once

#include <limits>

namespace arl::dynamics {

struct VehicleState {
  double position = 0.0;      // m
  double velocity = 0.0;      // m/s
  double acceleration = 0.0;  // m/s^2, as applied on the last step
};

struct WorldState {
  VehicleState lead;
  VehicleState follower;
  double cof = 1.0;  // road friction coefficient
  long step_index = 0;
};

struct SimParams {
  double dt = 0.040;            // s
  double gravity = 9.80665;     // m/s^2
  double headway_cap = 100.0;   // s
  double v_floor = 0.1;         // m/s, denominator floor for headway
};

/// Velocity interval a vehicle is kept inside after integration.
struct VelocityBounds {
  double min = 0.0;
  double max = std::numeric_limits<double>::infinity();
};

/// Commanded acceleration clamped to the friction envelope [-cof*g, cof*g].
double friction_limit(double a_cmd, double cof, double gravity = SimParams{}.gravity);

/// One semi-implicit Euler step of both vehicles (v' = v + a dt, x' = x + v' dt).
/// Each applied acceleration is friction-limited, then clipped so the velocity
/// stays inside its bounds (never below zero).
WorldState step(const WorldState& world, double a_lead_cmd, double a_follow_cmd,
                const SimParams& params, VelocityBounds lead_bounds = {},
                VelocityBounds follow_bounds = {});

/// Bumper-to-bumper gap, lead minus follower position.
double gap(const WorldState& world);

/// gap / max(v_f, v_floor), clamped to [0, headway_cap].
double headway(const WorldState& world, const SimParams& params);
double headway(double gap_m, double follower_speed, const SimParams& params);

bool collision_check(const WorldState& world);

}  // namespace arl::dynamics
