#pragma once

#include "arl/a2c/trainer.hpp"
#include "arl/harness/config.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace arl::harness {

/// "naive", "robust" or "network" (loaded from settings.network_path).
std::unique_ptr<targets::FollowerPolicy> make_follower(const std::string& name,
                                                       const FollowerSettings& settings);

/// Seed of one run. Depends only on the base seed and the run's identity, so
/// the order in which cells execute cannot change any result.
std::uint64_t run_seed(std::uint64_t base_seed, std::string_view follower,
                       const env::VelocityRange& range, int run);

struct RunSummary {
  std::string follower;
  env::VelocityRange range;
  int run = 0;
  std::uint64_t seed = 0;
  long collisions = 0;
  std::optional<long> episodes_to_first;  // 1-based; none when the run never collided
  std::vector<a2c::EpisodeRecord> episodes;
};

struct CollisionStats {
  double mean_collisions = 0.0;
  std::optional<double> mean_episodes_to_first;  // over runs that collided; none if none did
};

/// Throws UsageError for empty input or mismatched lengths.
CollisionStats collision_stats(std::span<const long> collisions,
                               std::span<const std::optional<long>> episodes_to_first);
CollisionStats collision_stats(std::span<const RunSummary> runs);

struct CellSummary {
  std::string follower;
  env::VelocityRange range;
  std::vector<RunSummary> runs;
  CollisionStats stats;
};

/// "naive_17-30"
std::string cell_name(std::string_view follower, const env::VelocityRange& range);
std::filesystem::path run_directory(const std::filesystem::path& out, std::string_view follower,
                                    const env::VelocityRange& range, int run);

inline constexpr const char* kSummaryFile = "summary.txt";
inline constexpr const char* kEpisodesFile = "episodes.csv";
inline constexpr const char* kReplayDir = "replays";

std::filesystem::path replay_path(const std::filesystem::path& run_dir, long episode);

using RunCallback = std::function<void(const RunSummary&)>;

/// Trains every (follower, range, run) of the plan, writing under plan.out_dir:
///   config.txt, summary.txt (written last),
///   <follower>_<lo>-<hi>/run_<r>/{episodes.csv, actor.nnet, config.txt, replays/}.
/// The output directory is probed for writability before any compute.
/// `on_run` is called from worker threads, one call at a time.
std::vector<CellSummary> run_experiment(const FullConfig& cfg, const RunCallback& on_run = {});

/// Key-value summary text of finished cells.
std::string summary_text(const FullConfig& cfg, std::span<const CellSummary> cells);

}  // namespace arl::harness
