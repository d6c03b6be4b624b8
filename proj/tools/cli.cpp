#include "arl/cli/cli.hpp"

#include "arl/error.hpp"
#include "arl/harness/baseline.hpp"
#include "arl/harness/config.hpp"
#include "arl/harness/experiment.hpp"
#include "arl/harness/report.hpp"

#include <CLI11.hpp>

#include <optional>

namespace arl::cli {
namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string scale;
};

void add_common(CLI::App& cmd, Options& o) {
  cmd.add_option("--config", o.config, "configuration file (section.key = value)");
  cmd.add_option("--seed", o.seed, "base seed override");
  cmd.add_option("--out", o.out, "output directory");
  cmd.add_option("--scale", o.scale, "run-count preset")->check(CLI::IsMember({"desk", "paper"}));
}

harness::FullConfig resolve(const Options& o) {
  std::optional<harness::Scale> scale;
  if (!o.scale.empty()) scale = harness::parse_scale(o.scale);
  harness::FullConfig cfg = o.config.empty()
                                ? harness::parse_config_text("", "<defaults>", scale)
                                : harness::parse_config_file(o.config, scale);
  if (o.seed) cfg.plan.base_seed = *o.seed;
  if (!o.out.empty()) cfg.plan.out_dir = o.out;
  cfg.validate();
  return cfg;
}

int train(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = resolve(o);
  err << "training " << cfg.plan.followers.size() * cfg.plan.ranges.size() << " cells x "
      << cfg.plan.runs_per_cell << " runs x " << cfg.plan.episodes_per_run << " episodes into "
      << cfg.plan.out_dir.string() << '\n';
  const auto cells = harness::run_experiment(cfg, [&](const harness::RunSummary& r) {
    err << "  " << harness::cell_name(r.follower, r.range) << " run " << r.run << ": "
        << r.collisions << " collisions\n";
  });
  out << "cell,mean_collisions,mean_episodes_to_first\n";
  for (const auto& c : cells)
    out << harness::cell_name(c.follower, c.range) << ','
        << harness::format_double(c.stats.mean_collisions) << ','
        << harness::format_optional(c.stats.mean_episodes_to_first) << '\n';
  return kExitOk;
}

int baseline(const Options& o, std::ostream& out) {
  const auto cfg = resolve(o);
  out << harness::read_text_file(harness::run_baseline(cfg));
  return kExitOk;
}

std::filesystem::path log_dir(const Options& o) {
  // Only the output location matters here, but a given config must still parse.
  return resolve(o).plan.out_dir;
}

int replay(const Options& o, std::ostream& out) {
  const auto path = harness::write_replay_index(log_dir(o));
  out << harness::read_text_file(path);
  return kExitOk;
}

int report(const Options& o, std::ostream& out) {
  const auto dir = harness::write_report(log_dir(o));
  out << harness::read_text_file(dir / "collisions.csv");
  if (std::filesystem::exists(dir / "baseline.csv")) out << '\n' << harness::read_text_file(dir / "baseline.csv");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adversarial testing of car-following controllers"};
  app.name("arl");
  app.require_subcommand(1);
  Options o;
  auto* train_cmd = app.add_subcommand("train", "train adversaries against each follower and range");
  auto* baseline_cmd = app.add_subcommand("baseline", "scripted lead maneuvers against each follower");
  auto* replay_cmd = app.add_subcommand("replay", "index collision traces of a finished experiment");
  auto* report_cmd = app.add_subcommand("report", "recompute summary tables and plot series from logs");
  for (auto* cmd : {train_cmd, baseline_cmd, replay_cmd, report_cmd}) add_common(*cmd, o);

  std::vector<const char*> argv{"arl"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return train(o, out, err);
    if (*baseline_cmd) return baseline(o, out);
    if (*replay_cmd) return replay(o, out);
    return report(o, out);
  } catch (const ConfigError& e) {
    err << "arl: configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "arl: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "arl: I/O error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "arl: error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace arl::cli
