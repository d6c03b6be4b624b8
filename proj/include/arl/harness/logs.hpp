#pragma once

#include "arl/a2c/trainer.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arl::harness {

inline constexpr std::string_view kEpisodeHeader =
    "episode,cof,min_th_s,return,steps,collision,first_collision_step";
inline constexpr std::string_view kTraceHeader =
    "step,t_s,v_lead,v_follow,a_lead_cmd,a_lead_applied,a_follow_cmd,a_follow_applied,gap_m,th_s,"
    "reward";

/// 9 significant digits, the precision used by every CSV and report value.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

/// One parsed row of an episode CSV.
struct EpisodeRow {
  long episode = 0;
  double cof = 0.0;
  double min_th = 0.0;
  double total_return = 0.0;
  long steps = 0;
  bool collision = false;
  std::optional<long> collision_step;
};

void write_episode_row(std::ostream& out, const a2c::EpisodeRecord& rec);
/// Throws IoError naming the file and line on any malformed content.
std::vector<EpisodeRow> read_episode_csv(const std::filesystem::path& path);

void write_trace_csv(const std::filesystem::path& path, std::span<const a2c::TraceRow> rows);
std::vector<a2c::TraceRow> read_trace_csv(const std::filesystem::path& path);

/// Creates `dir` if needed and proves it is writable; throws IoError otherwise.
void ensure_writable_directory(const std::filesystem::path& dir);

/// Reads a whole text file; throws IoError if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename so readers never see a half-written file.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace arl::harness
