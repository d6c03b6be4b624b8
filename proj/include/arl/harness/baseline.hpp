#pragma once

#include "arl/harness/config.hpp"

#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>

namespace arl::harness {

enum class Maneuver { cruise, accelerate, brake, sine, emergency_brake };

std::string_view to_string(Maneuver m);

/// Randomized scripted lead driver. Each segment picks a maneuver uniformly and
/// holds it for a dwell time drawn from [dwell_min, dwell_max].
class LeadScript {
 public:
  LeadScript(const BaselineConfig& cfg, std::mt19937_64& rng);

  /// Commanded lead acceleration for the coming step given the current speed.
  double command(double v_lead, double dt);
  Maneuver current() const { return kind_; }

 private:
  void start_segment(double v_lead);

  const BaselineConfig& cfg_;
  std::mt19937_64& rng_;
  Maneuver kind_ = Maneuver::cruise;
  double remaining_ = 0.0;  // s left in the segment
  double elapsed_ = 0.0;    // s into the segment
  double target_ = 0.0;     // speed target of accelerate, brake and emergency_brake
  double rate_ = 0.0;
  double amplitude_ = 0.0;
  double omega_ = 0.0;
};

/// Aggregates over every simulated step. The optional fields are none when no
/// step was simulated.
struct BaselineStats {
  std::optional<double> min_gap;
  std::optional<double> mean_gap;
  std::optional<double> max_abs_v_rel;
  std::optional<double> mean_v_rel;
  std::optional<double> min_th;
  std::optional<double> mean_th;
  long collisions = 0;
  long episodes = 0;
  long steps = 0;
};

/// Drives `follower` behind scripted lead maneuvers for cfg.hours of simulated
/// time, split into episodes of cfg.episode_seconds. A collision ends its
/// episode and the next one starts fresh. Throws ConfigError for invalid cfg.
BaselineStats manual_baseline(targets::FollowerPolicy& follower, const BaselineConfig& cfg,
                              std::mt19937_64& rng, const dynamics::SimParams& sim = {});

inline constexpr std::string_view kBaselineHeader =
    "follower,hours,episodes,steps,collisions,min_gap_m,mean_gap_m,max_abs_v_rel,mean_v_rel,"
    "min_th_s,mean_th_s";

std::string baseline_row(std::string_view follower, double hours, const BaselineStats& s);

/// Runs every follower of the plan (seeded per follower from the base seed)
/// and writes <out>/baseline_stats.csv. Returns the file path.
std::filesystem::path run_baseline(const FullConfig& cfg);

}  // namespace arl::harness
