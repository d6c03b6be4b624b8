#include "arl/harness/experiment.hpp"

#include "arl/error.hpp"
#include "arl/harness/logs.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace arl::harness {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Streams episode rows as they finish so an interrupted run leaves a readable prefix.
class RunWriter final : public a2c::EpisodeObserver {
 public:
  RunWriter(const fs::path& dir, bool replays) : dir_(dir), replays_(replays) {
    out_.open(dir / kEpisodesFile, std::ios::trunc);
    if (!out_) throw IoError("cannot write " + (dir / kEpisodesFile).string());
    out_ << kEpisodeHeader << '\n';
    out_.flush();
  }

  void on_episode(const a2c::EpisodeRecord& rec, std::span<const a2c::TraceRow> trace,
                  const a2c::ActorNetwork&) override {
    write_episode_row(out_, rec);
    out_.flush();
    if (!out_) throw IoError("write failed for " + (dir_ / kEpisodesFile).string());
    if (replays_ && rec.collision) {
      fs::create_directories(dir_ / kReplayDir);
      write_trace_csv(replay_path(dir_, rec.episode), trace);
    }
  }

 private:
  fs::path dir_;
  bool replays_;
  std::ofstream out_;
};

struct Task {
  std::size_t cell;
  int run;
};

RunSummary execute(const FullConfig& cfg, const std::string& follower_name,
                   const env::VelocityRange& range, int run) {
  RunSummary summary;
  summary.follower = follower_name;
  summary.range = range;
  summary.run = run;
  summary.seed = run_seed(cfg.plan.base_seed, follower_name, range, run);

  const fs::path dir = run_directory(cfg.plan.out_dir, follower_name, range, run);
  fs::create_directories(dir);
  write_text_file(dir / "config.txt", "# follower = " + follower_name + ", range = " +
                                          range_label(range) + ", run = " + std::to_string(run) +
                                          ", seed = " + std::to_string(summary.seed) + "\n" +
                                          to_config_text(cfg));

  env::EnvConfig env_cfg = cfg.env;
  env_cfg.v_lead = range;
  auto follower = make_follower(follower_name, cfg.followers);
  RunWriter writer(dir, cfg.plan.record_replays);
  auto result = a2c::train_run(env_cfg, *follower, cfg.hyper, summary.seed,
                               cfg.plan.episodes_per_run, &writer, cfg.plan.record_replays);
  nnet::save_weights(result.actor->network(), dir / "actor.nnet");

  summary.episodes = std::move(result.log.episodes);
  for (const auto& ep : summary.episodes) {
    if (!ep.collision) continue;
    ++summary.collisions;
    if (!summary.episodes_to_first) summary.episodes_to_first = ep.episode + 1;
  }
  return summary;
}

}  // namespace

std::unique_ptr<targets::FollowerPolicy> make_follower(const std::string& name,
                                                       const FollowerSettings& settings) {
  if (name == "naive") return std::make_unique<targets::NaiveTracker>(settings.naive);
  if (name == "robust") return std::make_unique<targets::RobustFollower>(settings.robust);
  if (name == "network") {
    if (settings.network_path.empty())
      throw ConfigError("network.path is required for the network follower");
    return std::make_unique<targets::NetworkFollower>(
        targets::NetworkFollower::from_file(settings.network_path));
  }
  throw ConfigError("unknown follower '" + name + "'");
}

std::uint64_t run_seed(std::uint64_t base_seed, std::string_view follower,
                       const env::VelocityRange& range, int run) {
  const std::string id = std::string(follower) + "|" + format_double(range.min) + "|" +
                         format_double(range.max) + "|" + std::to_string(run);
  return splitmix64(splitmix64(base_seed) ^ fnv1a(id));
}

CollisionStats collision_stats(std::span<const long> collisions,
                               std::span<const std::optional<long>> episodes_to_first) {
  if (collisions.empty()) throw UsageError("collision_stats needs at least one run");
  if (collisions.size() != episodes_to_first.size())
    throw UsageError("collision_stats: count and first-collision lists differ in length");
  CollisionStats s;
  double total = 0.0;
  for (long c : collisions) total += static_cast<double>(c);
  s.mean_collisions = total / static_cast<double>(collisions.size());
  double sum_first = 0.0;
  int defined = 0;
  for (const auto& f : episodes_to_first) {
    if (!f) continue;
    sum_first += static_cast<double>(*f);
    ++defined;
  }
  if (defined > 0) s.mean_episodes_to_first = sum_first / defined;
  return s;
}

CollisionStats collision_stats(std::span<const RunSummary> runs) {
  std::vector<long> counts;
  std::vector<std::optional<long>> firsts;
  for (const auto& r : runs) {
    counts.push_back(r.collisions);
    firsts.push_back(r.episodes_to_first);
  }
  return collision_stats(counts, firsts);
}

std::string cell_name(std::string_view follower, const env::VelocityRange& range) {
  return std::string(follower) + "_" + range_label(range);
}

fs::path run_directory(const fs::path& out, std::string_view follower,
                       const env::VelocityRange& range, int run) {
  return out / cell_name(follower, range) / ("run_" + std::to_string(run));
}

fs::path replay_path(const fs::path& run_dir, long episode) {
  return run_dir / kReplayDir / ("episode_" + std::to_string(episode) + ".csv");
}

std::vector<CellSummary> run_experiment(const FullConfig& cfg, const RunCallback& on_run) {
  cfg.validate();
  const fs::path& out = cfg.plan.out_dir;
  ensure_writable_directory(out);
  // A stale summary would make a half-finished rerun look complete.
  std::error_code ec;
  fs::remove(out / kSummaryFile, ec);

  std::vector<CellSummary> cells;
  for (const auto& f : cfg.plan.followers) {
    for (const auto& r : cfg.plan.ranges) {
      CellSummary c;
      c.follower = f;
      c.range = r;
      c.runs.resize(static_cast<std::size_t>(cfg.plan.runs_per_cell));
      cells.push_back(std::move(c));
    }
  }
  if (cells.empty()) return cells;
  write_text_file(out / "config.txt", to_config_text(cfg));

  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (int r = 0; r < cfg.plan.runs_per_cell; ++r) tasks.push_back({c, r});

  int threads = cfg.plan.threads > 0 ? cfg.plan.threads
                                     : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min<int>(threads, static_cast<int>(tasks.size()));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  auto worker = [&] {
    while (!failed) {
      const std::size_t i = next++;
      if (i >= tasks.size()) return;
      const Task t = tasks[i];
      try {
        RunSummary s = execute(cfg, cells[t.cell].follower, cells[t.cell].range, t.run);
        std::lock_guard lock(mu);
        if (on_run) on_run(s);
        cells[t.cell].runs[static_cast<std::size_t>(t.run)] = std::move(s);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  for (auto& c : cells) c.stats = collision_stats(c.runs);
  write_text_file(out / kSummaryFile, summary_text(cfg, cells));
  return cells;
}

std::string summary_text(const FullConfig& cfg, std::span<const CellSummary> cells) {
  std::ostringstream s;
  s << "# experiment summary; episodes_to_first is 1-based, none when no run collided\n";
  s << "scale = " << to_string(cfg.scale) << '\n';
  s << "episodes_per_run = " << cfg.plan.episodes_per_run << '\n';
  s << "runs_per_cell = " << cfg.plan.runs_per_cell << '\n';
  s << "base_seed = " << cfg.plan.base_seed << '\n';
  s << "cells = ";
  for (std::size_t i = 0; i < cells.size(); ++i)
    s << (i ? "," : "") << cell_name(cells[i].follower, cells[i].range);
  s << '\n';
  for (const auto& c : cells) {
    const std::string p = "cell." + cell_name(c.follower, c.range) + ".";
    s << p << "follower = " << c.follower << '\n';
    s << p << "v_min = " << format_double(c.range.min) << '\n';
    s << p << "v_max = " << format_double(c.range.max) << '\n';
    s << p << "runs = " << c.runs.size() << '\n';
    s << p << "mean_collisions = " << format_double(c.stats.mean_collisions) << '\n';
    s << p << "mean_episodes_to_first = " << format_optional(c.stats.mean_episodes_to_first) << '\n';
    for (const auto& r : c.runs) {
      const std::string q = p + "run_" + std::to_string(r.run) + ".";
      s << q << "seed = " << r.seed << '\n';
      s << q << "collisions = " << r.collisions << '\n';
      s << q << "episodes_to_first = "
        << (r.episodes_to_first ? std::to_string(*r.episodes_to_first) : std::string("none")) << '\n';
    }
  }
  return s.str();
}

}  // namespace arl::harness
