#pragma once

#include "arl/a2c/a2c.hpp"
#include "arl/env/adversary_env.hpp"
#include "arl/targets/followers.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arl::harness {

enum class Scale { desk, paper };

std::string_view to_string(Scale s);
/// Throws ConfigError for anything but "desk" or "paper".
Scale parse_scale(std::string_view s);

struct ExperimentPlan {
  std::vector<std::string> followers{"naive", "robust"};
  std::vector<env::VelocityRange> ranges{env::kStandardVelocityRanges.begin(),
                                         env::kStandardVelocityRanges.end()};
  int runs_per_cell = 5;
  long episodes_per_run = 500;
  std::uint64_t base_seed = 1;
  std::filesystem::path out_dir = "out";
  bool record_replays = true;  // write step traces of collision episodes
  int threads = 0;             // 0: one per hardware thread

  void validate() const;
};

/// Scripted lead maneuvers for the manual driving test. Rates in m/s^2,
/// speed changes in m/s, durations in s.
struct BaselineConfig {
  double hours = 1.0;
  env::VelocityRange v_lead{17.0, 40.0};
  double cof_min = 0.4;
  double cof_max = 1.0;
  double episode_seconds = 300.0;
  double dwell_min = 10.0;
  double dwell_max = 60.0;
  double speed_change_min = 2.0;
  double speed_change_max = 8.0;
  double accel_min = 0.5;
  double accel_max = 2.0;
  double brake_min = -3.0;
  double brake_max = -0.5;
  double sine_amplitude_min = 0.5;
  double sine_amplitude_max = 3.0;
  double sine_period_min = 10.0;
  double sine_period_max = 30.0;
  double emergency_brake = -6.0;
  double emergency_drop_min = 3.0;
  double emergency_drop_max = 8.0;

  void validate() const;
};

struct FollowerSettings {
  targets::NaiveTrackerParams naive{2.0, 1.25, 2.0, -6.0};
  targets::RobustFollowerParams robust;
  std::filesystem::path network_path;  // required when "network" is selected
};

struct FullConfig {
  Scale scale = Scale::desk;
  ExperimentPlan plan;
  env::EnvConfig env;  // v_lead is replaced per cell
  a2c::Hyperparams hyper;
  FollowerSettings followers;
  BaselineConfig baseline;

  /// Cross-field checks; throws ConfigError naming the field.
  void validate() const;
};

/// Applies the run-count presets of a scale: desk = 5 x 500 episodes and a
/// 1 h baseline, paper = 5 x 2,500 episodes and a 10 h baseline.
void apply_scale(FullConfig& cfg, Scale scale);

/// Parses flat `section.key = value` text. `#` starts a comment. The scale
/// preset (from `scale_override`, else an `experiment.scale` key, else desk) is
/// applied first, then every explicit key. Unknown, duplicate or malformed keys
/// throw ConfigError naming `source` and the line.
FullConfig parse_config_text(std::string_view text, std::string_view source = "<config>",
                             std::optional<Scale> scale_override = std::nullopt);
FullConfig parse_config_file(const std::filesystem::path& path,
                             std::optional<Scale> scale_override = std::nullopt);

/// Every key with its resolved value; parse_config_text of the result gives
/// back an identical configuration.
std::string to_config_text(const FullConfig& cfg);

/// "17-30" style label used in directory names and reports.
std::string range_label(const env::VelocityRange& r);
env::VelocityRange parse_range(std::string_view s);

}  // namespace arl::harness
