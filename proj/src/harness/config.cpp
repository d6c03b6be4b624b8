#include "arl/harness/config.hpp"

#include "arl/error.hpp"
#include "arl/harness/logs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace arl::harness {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto item = trim(s.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Parse failures carry only the reason; the caller prefixes source, line and key.
struct ValueError {
  std::string reason;
};

double to_real(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ValueError{"expects a number, got '" + std::string(s) + "'"};
  return v;
}

long long to_integer(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ValueError{"expects an integer, got '" + std::string(s) + "'"};
  return v;
}

bool to_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ValueError{"expects true or false, got '" + std::string(s) + "'"};
}

struct Bound {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  std::string what;

  void check(double v) const {
    const bool ok = (lo_open ? v > lo : v >= lo) && v <= hi;
    if (!ok || !std::isfinite(v)) throw ValueError{what + " (got " + shortest(v) + ")"};
  }
};

const Bound kAny{-std::numeric_limits<double>::max(), std::numeric_limits<double>::max(), false,
                 "must be finite"};
const Bound kPositive{0.0, std::numeric_limits<double>::max(), true, "must be positive"};
const Bound kNonNegative{0.0, std::numeric_limits<double>::max(), false, "must be non-negative"};
const Bound kNonPositive{-std::numeric_limits<double>::max(), 0.0, false, "must be <= 0"};
const Bound kUnit{0.0, 1.0, false, "must lie in [0, 1]"};
const Bound kOpenUnit{0.0, 1.0, true, "must lie in (0, 1)"};

struct Key {
  std::string name;
  std::function<void(FullConfig&, std::string_view)> set;
  std::function<std::string(const FullConfig&)> get;
};

template <class Access>
Key real_key(std::string name, Access access, Bound bound) {
  return {name,
          [access, bound](FullConfig& c, std::string_view v) {
            const double x = to_real(v);
            bound.check(x);
            access(c) = x;
          },
          [access](const FullConfig& c) { return shortest(access(const_cast<FullConfig&>(c))); }};
}

template <class Access>
Key int_key(std::string name, Access access, long long min) {
  return {name,
          [access, min](FullConfig& c, std::string_view v) {
            const long long x = to_integer(v);
            if (x < min) throw ValueError{"must be at least " + std::to_string(min)};
            access(c) = static_cast<std::remove_reference_t<decltype(access(c))>>(x);
          },
          [access](const FullConfig& c) {
            return std::to_string(access(const_cast<FullConfig&>(c)));
          }};
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    k.push_back({"experiment.scale", [](FullConfig& c, std::string_view v) {
                   try {
                     c.scale = parse_scale(v);
                   } catch (const ConfigError& e) {
                     throw ValueError{e.what()};
                   }
                 },
                 [](const FullConfig& c) { return std::string(to_string(c.scale)); }});
    k.push_back({"experiment.followers",
                 [](FullConfig& c, std::string_view v) {
                   std::vector<std::string> names;
                   for (auto item : split_list(v)) {
                     const std::string name(item);
                     if (name != "naive" && name != "robust" && name != "network")
                       throw ValueError{"unknown follower '" + name + "' (naive, robust, network)"};
                     if (std::find(names.begin(), names.end(), name) != names.end())
                       throw ValueError{"lists follower '" + name + "' twice"};
                     names.push_back(name);
                   }
                   if (names.empty()) throw ValueError{"must name at least one follower"};
                   c.plan.followers = names;
                 },
                 [](const FullConfig& c) { return join(c.plan.followers); }});
    k.push_back({"experiment.ranges",
                 [](FullConfig& c, std::string_view v) {
                   std::vector<env::VelocityRange> ranges;
                   for (auto item : split_list(v)) {
                     try {
                       ranges.push_back(parse_range(item));
                     } catch (const ConfigError& e) {
                       throw ValueError{e.what()};
                     }
                   }
                   if (ranges.empty()) throw ValueError{"must list at least one range"};
                   c.plan.ranges = ranges;
                 },
                 [](const FullConfig& c) {
                   std::vector<std::string> labels;
                   for (const auto& r : c.plan.ranges) labels.push_back(range_label(r));
                   return join(labels);
                 }});
    k.push_back(int_key("experiment.runs_per_cell", [](FullConfig& c) -> int& { return c.plan.runs_per_cell; }, 1));
    k.push_back(int_key("experiment.episodes_per_run", [](FullConfig& c) -> long& { return c.plan.episodes_per_run; }, 1));
    k.push_back({"experiment.seed",
                 [](FullConfig& c, std::string_view v) {
                   std::uint64_t x = 0;
                   const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
                   if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
                     throw ValueError{"expects a non-negative integer, got '" + std::string(v) + "'"};
                   c.plan.base_seed = x;
                 },
                 [](const FullConfig& c) { return std::to_string(c.plan.base_seed); }});
    k.push_back(int_key("experiment.threads", [](FullConfig& c) -> int& { return c.plan.threads; }, 0));
    k.push_back({"output.dir", [](FullConfig& c, std::string_view v) { c.plan.out_dir = std::string(v); },
                 [](const FullConfig& c) { return c.plan.out_dir.string(); }});
    k.push_back({"output.replays", [](FullConfig& c, std::string_view v) { c.plan.record_replays = to_bool(v); },
                 [](const FullConfig& c) { return std::string(c.plan.record_replays ? "true" : "false"); }});

    k.push_back(real_key("env.a_lead_min", [](FullConfig& c) -> double& { return c.env.a_lead_min; }, kAny));
    k.push_back(real_key("env.a_lead_max", [](FullConfig& c) -> double& { return c.env.a_lead_max; }, kAny));
    k.push_back(int_key("env.episode_steps", [](FullConfig& c) -> long& { return c.env.episode_steps; }, 1));
    k.push_back(real_key("env.initial_headway", [](FullConfig& c) -> double& { return c.env.initial_headway; }, kPositive));
    k.push_back(real_key("env.dt", [](FullConfig& c) -> double& { return c.env.sim.dt; }, kPositive));
    k.push_back(real_key("env.headway_cap", [](FullConfig& c) -> double& { return c.env.sim.headway_cap; }, kPositive));
    k.push_back(real_key("env.v_floor", [](FullConfig& c) -> double& { return c.env.sim.v_floor; }, kPositive));

    k.push_back(real_key("a2c.gamma", [](FullConfig& c) -> double& { return c.hyper.gamma; }, kUnit));
    k.push_back(real_key("a2c.beta", [](FullConfig& c) -> double& { return c.hyper.beta; }, kNonNegative));
    k.push_back(real_key("a2c.lr_actor", [](FullConfig& c) -> double& { return c.hyper.lr_actor; }, kPositive));
    k.push_back(real_key("a2c.lr_critic", [](FullConfig& c) -> double& { return c.hyper.lr_critic; }, kPositive));
    k.push_back(real_key("a2c.rmsprop_decay", [](FullConfig& c) -> double& { return c.hyper.rmsprop.decay; }, kOpenUnit));
    k.push_back(real_key("a2c.rmsprop_epsilon", [](FullConfig& c) -> double& { return c.hyper.rmsprop.epsilon; }, kPositive));
    k.push_back(real_key("a2c.rmsprop_momentum", [](FullConfig& c) -> double& { return c.hyper.rmsprop.momentum; }, kNonNegative));
    k.push_back(int_key("a2c.rollout_steps", [](FullConfig& c) -> int& { return c.hyper.rollout_steps; }, 1));
    k.push_back(real_key("a2c.variance_floor", [](FullConfig& c) -> double& { return c.hyper.variance_floor; }, kPositive));
    k.push_back(int_key("a2c.actor_hidden_units", [](FullConfig& c) -> int& { return c.hyper.actor.hidden_units; }, 1));
    k.push_back(int_key("a2c.actor_hidden_layers", [](FullConfig& c) -> int& { return c.hyper.actor.hidden_layers; }, 1));
    k.push_back(int_key("a2c.lstm_units", [](FullConfig& c) -> int& { return c.hyper.actor.lstm_units; }, 1));
    k.push_back(int_key("a2c.critic_hidden_units", [](FullConfig& c) -> int& { return c.hyper.critic.hidden_units; }, 1));
    k.push_back(int_key("a2c.critic_hidden_layers", [](FullConfig& c) -> int& { return c.hyper.critic.hidden_layers; }, 1));

    k.push_back(real_key("naive.target_headway", [](FullConfig& c) -> double& { return c.followers.naive.target_headway; }, kPositive));
    k.push_back(real_key("naive.headway_gain", [](FullConfig& c) -> double& { return c.followers.naive.headway_gain; }, kNonNegative));
    k.push_back(real_key("naive.accel_limit", [](FullConfig& c) -> double& { return c.followers.naive.accel_limit; }, kNonNegative));
    k.push_back(real_key("naive.brake_limit", [](FullConfig& c) -> double& { return c.followers.naive.brake_limit; }, kNonPositive));
    k.push_back(real_key("robust.target_headway", [](FullConfig& c) -> double& { return c.followers.robust.target_headway; }, kPositive));
    k.push_back(real_key("robust.gap_gain", [](FullConfig& c) -> double& { return c.followers.robust.gap_gain; }, kAny));
    k.push_back(real_key("robust.speed_gain", [](FullConfig& c) -> double& { return c.followers.robust.speed_gain; }, kAny));
    k.push_back(real_key("robust.emergency_ttc", [](FullConfig& c) -> double& { return c.followers.robust.emergency_ttc; }, kPositive));
    k.push_back(real_key("robust.max_brake", [](FullConfig& c) -> double& { return c.followers.robust.max_brake; }, kNonPositive));
    k.push_back({"network.path", [](FullConfig& c, std::string_view v) { c.followers.network_path = std::string(v); },
                 [](const FullConfig& c) { return c.followers.network_path.string(); }});

    auto b = [](double BaselineConfig::*m) {
      return [m](FullConfig& c) -> double& { return c.baseline.*m; };
    };
    k.push_back(real_key("baseline.hours", b(&BaselineConfig::hours), kNonNegative));
    k.push_back(real_key("baseline.v_lead_min", [](FullConfig& c) -> double& { return c.baseline.v_lead.min; }, kNonNegative));
    k.push_back(real_key("baseline.v_lead_max", [](FullConfig& c) -> double& { return c.baseline.v_lead.max; }, kPositive));
    k.push_back(real_key("baseline.cof_min", b(&BaselineConfig::cof_min), kPositive));
    k.push_back(real_key("baseline.cof_max", b(&BaselineConfig::cof_max), kPositive));
    k.push_back(real_key("baseline.episode_seconds", b(&BaselineConfig::episode_seconds), kPositive));
    k.push_back(real_key("baseline.dwell_min", b(&BaselineConfig::dwell_min), kPositive));
    k.push_back(real_key("baseline.dwell_max", b(&BaselineConfig::dwell_max), kPositive));
    k.push_back(real_key("baseline.speed_change_min", b(&BaselineConfig::speed_change_min), kNonNegative));
    k.push_back(real_key("baseline.speed_change_max", b(&BaselineConfig::speed_change_max), kNonNegative));
    k.push_back(real_key("baseline.accel_min", b(&BaselineConfig::accel_min), kPositive));
    k.push_back(real_key("baseline.accel_max", b(&BaselineConfig::accel_max), kPositive));
    k.push_back(real_key("baseline.brake_min", b(&BaselineConfig::brake_min), kNonPositive));
    k.push_back(real_key("baseline.brake_max", b(&BaselineConfig::brake_max), kNonPositive));
    k.push_back(real_key("baseline.sine_amplitude_min", b(&BaselineConfig::sine_amplitude_min), kNonNegative));
    k.push_back(real_key("baseline.sine_amplitude_max", b(&BaselineConfig::sine_amplitude_max), kNonNegative));
    k.push_back(real_key("baseline.sine_period_min", b(&BaselineConfig::sine_period_min), kPositive));
    k.push_back(real_key("baseline.sine_period_max", b(&BaselineConfig::sine_period_max), kPositive));
    k.push_back(real_key("baseline.emergency_brake", b(&BaselineConfig::emergency_brake), kNonPositive));
    k.push_back(real_key("baseline.emergency_drop_min", b(&BaselineConfig::emergency_drop_min), kNonNegative));
    k.push_back(real_key("baseline.emergency_drop_max", b(&BaselineConfig::emergency_drop_max), kNonNegative));
    return k;
  }();
  return keys;
}

struct Entry {
  std::string key;
  std::string value;
  long line = 0;
};

}  // namespace

std::string_view to_string(Scale s) { return s == Scale::desk ? "desk" : "paper"; }

Scale parse_scale(std::string_view s) {
  if (s == "desk") return Scale::desk;
  if (s == "paper") return Scale::paper;
  throw ConfigError("scale must be desk or paper, got '" + std::string(s) + "'");
}

std::string range_label(const env::VelocityRange& r) {
  return format_double(r.min) + "-" + format_double(r.max);
}

env::VelocityRange parse_range(std::string_view s) {
  const auto dash = s.find('-');
  if (dash == std::string_view::npos || dash == 0)
    throw ConfigError("velocity range must look like LO-HI, got '" + std::string(s) + "'");
  try {
    const env::VelocityRange r{to_real(trim(s.substr(0, dash))), to_real(trim(s.substr(dash + 1)))};
    if (!(r.min >= 0.0 && r.min < r.max))
      throw ConfigError("velocity range needs 0 <= LO < HI, got '" + std::string(s) + "'");
    return r;
  } catch (const ValueError& e) {
    throw ConfigError("velocity range '" + std::string(s) + "': " + e.reason);
  }
}

void ExperimentPlan::validate() const {
  for (const auto& r : ranges)
    if (!(r.min >= 0.0 && r.min < r.max))
      throw ConfigError("experiment.ranges: invalid range " + range_label(r));
  if (runs_per_cell < 1) throw ConfigError("experiment.runs_per_cell must be at least 1");
  if (episodes_per_run < 1) throw ConfigError("experiment.episodes_per_run must be at least 1");
  if (threads < 0) throw ConfigError("experiment.threads must be non-negative");
}

void BaselineConfig::validate() const {
  auto ordered = [](double lo, double hi, const char* name) {
    if (!(lo <= hi)) throw ConfigError(std::string(name) + "_min must not exceed " + name + "_max");
  };
  if (!(hours >= 0.0)) throw ConfigError("baseline.hours must be non-negative");
  if (!(v_lead.min >= 0.0 && v_lead.min < v_lead.max))
    throw ConfigError("baseline.v_lead_min must be below baseline.v_lead_max");
  ordered(cof_min, cof_max, "baseline.cof");
  ordered(dwell_min, dwell_max, "baseline.dwell");
  ordered(speed_change_min, speed_change_max, "baseline.speed_change");
  ordered(accel_min, accel_max, "baseline.accel");
  ordered(brake_min, brake_max, "baseline.brake");
  ordered(sine_amplitude_min, sine_amplitude_max, "baseline.sine_amplitude");
  ordered(sine_period_min, sine_period_max, "baseline.sine_period");
  ordered(emergency_drop_min, emergency_drop_max, "baseline.emergency_drop");
  if (!(episode_seconds > 0.0)) throw ConfigError("baseline.episode_seconds must be positive");
}

void FullConfig::validate() const {
  plan.validate();
  env::EnvConfig probe = env;
  for (const auto& r : plan.ranges) {
    probe.v_lead = r;
    probe.validate();
  }
  hyper.validate();
  targets::NaiveTracker{followers.naive};
  targets::RobustFollower{followers.robust};
  baseline.validate();
  const bool wants_network =
      std::find(plan.followers.begin(), plan.followers.end(), "network") != plan.followers.end();
  if (wants_network && followers.network_path.empty())
    throw ConfigError("network.path is required when experiment.followers includes network");
}

void apply_scale(FullConfig& cfg, Scale scale) {
  cfg.scale = scale;
  cfg.plan.runs_per_cell = 5;
  cfg.plan.episodes_per_run = scale == Scale::desk ? 500 : 2500;
  cfg.baseline.hours = scale == Scale::desk ? 1.0 : 10.0;
}

FullConfig parse_config_text(std::string_view text, std::string_view source,
                             std::optional<Scale> scale_override) {
  const std::string src(source);
  std::vector<Entry> entries;
  std::map<std::string, long> seen;
  long line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(src + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(src + ":" + std::to_string(line_no) + ": missing key");
    if (auto [it, fresh] = seen.emplace(key, line_no); !fresh)
      throw ConfigError(src + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                        "' (first set on line " + std::to_string(it->second) + ")");
    entries.push_back({key, value, line_no});
  }

  auto where = [&](const Entry& e) { return src + ":" + std::to_string(e.line) + ": " + e.key + " "; };

  FullConfig cfg;
  Scale scale = Scale::desk;
  for (const auto& e : entries) {
    if (e.key != "experiment.scale") continue;
    try {
      scale = parse_scale(e.value);
    } catch (const ConfigError&) {
      throw ConfigError(where(e) + "must be desk or paper, got '" + e.value + "'");
    }
  }
  if (scale_override) scale = *scale_override;
  apply_scale(cfg, scale);

  std::optional<double> v_min;
  std::optional<double> v_max;
  const Entry* ranges_entry = nullptr;
  for (const auto& e : entries) {
    if (e.key == "experiment.scale") continue;
    try {
      if (e.key == "env.v_lead_min" || e.key == "env.v_lead_max") {
        const double v = to_real(e.value);
        kNonNegative.check(v);
        (e.key == "env.v_lead_min" ? v_min : v_max) = v;
        continue;
      }
      const auto& keys = registry();
      const auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) { return k.name == e.key; });
      if (it == keys.end())
        throw ConfigError(src + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
      it->set(cfg, e.value);
      if (e.key == "experiment.ranges") ranges_entry = &e;
    } catch (const ValueError& err) {
      throw ConfigError(where(e) + err.reason);
    }
  }
  cfg.scale = scale;

  if (v_min || v_max) {
    if (!v_min || !v_max)
      throw ConfigError(src + ": env.v_lead_min and env.v_lead_max must be given together");
    if (ranges_entry)
      throw ConfigError(src + ":" + std::to_string(ranges_entry->line) +
                        ": experiment.ranges conflicts with env.v_lead_min/env.v_lead_max");
    if (!(*v_min < *v_max))
      throw ConfigError(src + ": env.v_lead_min must be below env.v_lead_max");
    cfg.plan.ranges = {env::VelocityRange{*v_min, *v_max}};
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(src + ": " + e.what());
  }
  return cfg;
}

FullConfig parse_config_file(const std::filesystem::path& path, std::optional<Scale> scale_override) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  return parse_config_text(text, path.string(), scale_override);
}

std::string to_config_text(const FullConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : registry()) {
    const std::string s = k.name.substr(0, k.name.find('.'));
    if (s != section) {
      if (!section.empty()) out << '\n';
      section = s;
    }
    out << k.name << " = " << k.get(cfg) << '\n';
  }
  return out.str();
}

}  // namespace arl::harness
