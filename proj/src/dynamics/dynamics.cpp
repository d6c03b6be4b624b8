#include "arl/dynamics/dynamics.hpp"

#include <algorithm>

namespace arl::dynamics {

double friction_limit(double a_cmd, double cof, double gravity) {
  const double limit = cof * gravity;
  return std::clamp(a_cmd, -limit, limit);
}

namespace {

VehicleState advance(const VehicleState& v, double a_cmd, double cof, const SimParams& p,
                     VelocityBounds bounds) {
  const double lo = std::max(bounds.min, 0.0);
  double a = friction_limit(a_cmd, cof, p.gravity);
  // keep the velocity inside its bounds; the interval always contains 0
  // while the vehicle itself is inside them, so friction clamping cannot
  // push the command back out
  a = std::clamp(a, std::min(0.0, (lo - v.velocity) / p.dt),
                 std::max(0.0, (bounds.max - v.velocity) / p.dt));
  VehicleState next;
  next.acceleration = a;
  next.velocity = std::clamp(v.velocity + a * p.dt, std::min(lo, v.velocity),
                             std::max(bounds.max, v.velocity));
  next.velocity = std::max(next.velocity, 0.0);
  next.position = v.position + next.velocity * p.dt;
  return next;
}

}  // namespace

WorldState step(const WorldState& world, double a_lead_cmd, double a_follow_cmd,
                const SimParams& params, VelocityBounds lead_bounds,
                VelocityBounds follow_bounds) {
  WorldState next = world;
  next.lead = advance(world.lead, a_lead_cmd, world.cof, params, lead_bounds);
  next.follower = advance(world.follower, a_follow_cmd, world.cof, params, follow_bounds);
  ++next.step_index;
  return next;
}

double gap(const WorldState& world) { return world.lead.position - world.follower.position; }

double headway(double gap_m, double follower_speed, const SimParams& params) {
  const double th = gap_m / std::max(follower_speed, params.v_floor);
  return std::clamp(th, 0.0, params.headway_cap);
}

double headway(const WorldState& world, const SimParams& params) {
  return headway(gap(world), world.follower.velocity, params);
}

bool collision_check(const WorldState& world) { return gap(world) <= 0.0; }

}  // namespace arl::dynamics
