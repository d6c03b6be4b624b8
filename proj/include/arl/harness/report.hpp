#pragma once

#include "arl/harness/experiment.hpp"
#include "arl/harness/logs.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace arl::harness {

/// Parsed summary.txt of a finished experiment.
class SummaryFile {
 public:
  /// Throws IoError when the file is missing or malformed.
  static SummaryFile read(const std::filesystem::path& out_dir);

  const std::string& get(const std::string& key) const;
  long get_long(const std::string& key) const;
  std::vector<std::string> cells() const;

 private:
  std::filesystem::path path_;
  std::map<std::string, std::string> values_;
};

struct CellReport {
  std::string name;
  std::string follower;
  env::VelocityRange range;
  std::vector<long> collisions;                    // per run
  std::vector<std::optional<long>> first;          // per run, 1-based
  std::vector<double> min_th_mean;                 // per episode, across runs
  std::vector<double> min_th_std;                  // population standard deviation
  CollisionStats stats;
};

struct CollisionReplay {
  std::string cell;
  int run = 0;
  long episode = 0;
  std::vector<a2c::TraceRow> rows;
};

/// Recomputes every statistic from the raw episode CSVs of a finished
/// experiment. Refuses (IoError) when summary.txt is absent, a run's CSV is
/// missing or short, or the logs disagree with the summary.
std::vector<CellReport> build_report(const std::filesystem::path& out_dir);

/// Writes <out>/report/: min_th_<cell>.csv per cell, collisions.csv and, when
/// <out>/baseline_stats.csv exists, baseline.csv. Returns the report directory.
std::filesystem::path write_report(const std::filesystem::path& out_dir);

/// Collision traces of one run directory, ordered by episode. Every collision
/// flagged in episodes.csv must have its trace; each trace must end with gap <= 0.
std::vector<CollisionReplay> extract_replays(const std::filesystem::path& run_dir,
                                             const std::string& cell = {}, int run = 0);

/// All replays of a finished experiment, by cell, run and episode.
std::vector<CollisionReplay> extract_all_replays(const std::filesystem::path& out_dir);

/// Writes <out>/replay_index.csv listing every replay file; returns its path.
std::filesystem::path write_replay_index(const std::filesystem::path& out_dir);

}  // namespace arl::harness
