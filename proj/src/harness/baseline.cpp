#include "arl/harness/baseline.hpp"

#include "arl/error.hpp"
#include "arl/harness/experiment.hpp"
#include "arl/harness/logs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace arl::harness {
namespace {

constexpr double kInitialHeadway = 2.0;  // s, same start as training episodes

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct Accumulator {
  double min_gap = std::numeric_limits<double>::infinity();
  double sum_gap = 0.0;
  double max_abs_v_rel = 0.0;
  double sum_v_rel = 0.0;
  double min_th = std::numeric_limits<double>::infinity();
  double sum_th = 0.0;
  long n = 0;

  void add(double gap_m, double v_rel, double t_h) {
    min_gap = std::min(min_gap, gap_m);
    sum_gap += gap_m;
    max_abs_v_rel = std::max(max_abs_v_rel, std::abs(v_rel));
    sum_v_rel += v_rel;
    min_th = std::min(min_th, t_h);
    sum_th += t_h;
    ++n;
  }
};

}  // namespace

std::string_view to_string(Maneuver m) {
  switch (m) {
    case Maneuver::cruise: return "cruise";
    case Maneuver::accelerate: return "accelerate";
    case Maneuver::brake: return "brake";
    case Maneuver::sine: return "sine";
    case Maneuver::emergency_brake: return "emergency_brake";
  }
  return "?";
}

LeadScript::LeadScript(const BaselineConfig& cfg, std::mt19937_64& rng) : cfg_(cfg), rng_(rng) {}

void LeadScript::start_segment(double v) {
  kind_ = static_cast<Maneuver>(std::uniform_int_distribution<int>(0, 4)(rng_));
  remaining_ = uniform(rng_, cfg_.dwell_min, cfg_.dwell_max);
  elapsed_ = 0.0;
  switch (kind_) {
    case Maneuver::cruise:
      break;
    case Maneuver::accelerate:
      target_ = std::min(v + uniform(rng_, cfg_.speed_change_min, cfg_.speed_change_max), cfg_.v_lead.max);
      rate_ = uniform(rng_, cfg_.accel_min, cfg_.accel_max);
      break;
    case Maneuver::brake:
      target_ = std::max(v - uniform(rng_, cfg_.speed_change_min, cfg_.speed_change_max), cfg_.v_lead.min);
      rate_ = uniform(rng_, cfg_.brake_min, cfg_.brake_max);
      break;
    case Maneuver::sine:
      amplitude_ = uniform(rng_, cfg_.sine_amplitude_min, cfg_.sine_amplitude_max);
      omega_ = 2.0 * std::numbers::pi / uniform(rng_, cfg_.sine_period_min, cfg_.sine_period_max);
      break;
    case Maneuver::emergency_brake:
      target_ = std::max(v - uniform(rng_, cfg_.emergency_drop_min, cfg_.emergency_drop_max), cfg_.v_lead.min);
      rate_ = cfg_.emergency_brake;
      break;
  }
}

double LeadScript::command(double v, double dt) {
  if (remaining_ <= 0.0) start_segment(v);
  double a = 0.0;
  switch (kind_) {
    case Maneuver::cruise:
      break;
    case Maneuver::accelerate:
      if (v < target_) a = std::min(rate_, (target_ - v) / dt);
      break;
    case Maneuver::brake:
    case Maneuver::emergency_brake:
      if (v > target_) a = std::max(rate_, (target_ - v) / dt);
      break;
    case Maneuver::sine:
      a = amplitude_ * omega_ * std::cos(omega_ * elapsed_);
      break;
  }
  elapsed_ += dt;
  remaining_ -= dt;
  return std::clamp(a, targets::kCommandMin, targets::kCommandMax);
}

BaselineStats manual_baseline(targets::FollowerPolicy& follower, const BaselineConfig& cfg,
                              std::mt19937_64& rng, const dynamics::SimParams& sim) {
  cfg.validate();
  BaselineStats stats;
  const long total = std::lround(cfg.hours * 3600.0 / sim.dt);
  const long per_episode = std::max(1L, std::lround(cfg.episode_seconds / sim.dt));
  const dynamics::VelocityBounds bounds{cfg.v_lead.min, cfg.v_lead.max};
  constexpr double kSlack = 1e-9;

  Accumulator acc;
  long done = 0;
  while (done < total) {
    const double v0 = uniform(rng, cfg.v_lead.min, cfg.v_lead.max);
    dynamics::WorldState world;
    world.cof = uniform(rng, cfg.cof_min, cfg.cof_max);
    world.lead.velocity = v0;
    world.follower.velocity = v0;
    world.lead.position = kInitialHeadway * v0;
    follower.reset();
    LeadScript script(cfg, rng);
    ++stats.episodes;

    const long steps = std::min(per_episode, total - done);
    for (long k = 0; k < steps; ++k) {
      const double a_lead = script.command(world.lead.velocity, sim.dt);
      const double a_follow = follower.command(env::follower_view(env::observe(world, sim)));
      world = dynamics::step(world, a_lead, a_follow, sim, bounds, {});
      ++done;

      const double v = world.lead.velocity;
      const double a = world.lead.acceleration;
      if (v < cfg.v_lead.min - kSlack || v > cfg.v_lead.max + kSlack || a < targets::kCommandMin - kSlack ||
          a > targets::kCommandMax + kSlack)
        throw std::logic_error("baseline lead left its envelope: v = " + format_double(v) +
                               ", a = " + format_double(a) + " during " +
                               std::string(to_string(script.current())));

      const double g = dynamics::gap(world);
      acc.add(g, world.lead.velocity - world.follower.velocity, dynamics::headway(world, sim));
      if (dynamics::collision_check(world)) {
        ++stats.collisions;
        break;
      }
    }
  }

  stats.steps = acc.n;
  if (acc.n > 0) {
    const double n = static_cast<double>(acc.n);
    stats.min_gap = acc.min_gap;
    stats.mean_gap = acc.sum_gap / n;
    stats.max_abs_v_rel = acc.max_abs_v_rel;
    stats.mean_v_rel = acc.sum_v_rel / n;
    stats.min_th = acc.min_th;
    stats.mean_th = acc.sum_th / n;
  }
  return stats;
}

std::string baseline_row(std::string_view follower, double hours, const BaselineStats& s) {
  std::ostringstream out;
  out << follower << ',' << format_double(hours) << ',' << s.episodes << ',' << s.steps << ','
      << s.collisions << ',' << format_optional(s.min_gap) << ',' << format_optional(s.mean_gap)
      << ',' << format_optional(s.max_abs_v_rel) << ',' << format_optional(s.mean_v_rel) << ','
      << format_optional(s.min_th) << ',' << format_optional(s.mean_th);
  return out.str();
}

std::filesystem::path run_baseline(const FullConfig& cfg) {
  cfg.validate();
  ensure_writable_directory(cfg.plan.out_dir);
  std::ostringstream out;
  out << kBaselineHeader << '\n';
  for (const auto& name : cfg.plan.followers) {
    auto follower = make_follower(name, cfg.followers);
    std::mt19937_64 rng(run_seed(cfg.plan.base_seed, "baseline:" + name, cfg.baseline.v_lead, 0));
    const BaselineStats s = manual_baseline(*follower, cfg.baseline, rng, cfg.env.sim);
    out << baseline_row(name, cfg.baseline.hours, s) << '\n';
  }
  const auto path = cfg.plan.out_dir / "baseline_stats.csv";
  write_text_file(path, out.str());
  return path;
}

}  // namespace arl::harness
