#include "arl/harness/report.hpp"

#include "arl/error.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace fs = std::filesystem;

namespace arl::harness {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::optional<long> parse_optional_long(const std::string& s) {
  if (s == "none") return std::nullopt;
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("bad count '" + s + "'");
  return v;
}

}  // namespace

SummaryFile SummaryFile::read(const fs::path& out_dir) {
  SummaryFile f;
  f.path_ = out_dir / kSummaryFile;
  if (!fs::exists(f.path_))
    throw IoError("no " + f.path_.string() +
                  ": the experiment did not finish (interrupted or still running), refusing to report");
  std::istringstream in(read_text_file(f.path_));
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw IoError(f.path_.string() + ": line " + std::to_string(n) + ": expected 'key = value'");
    f.values_[std::string(trim(t.substr(0, eq)))] = std::string(trim(t.substr(eq + 1)));
  }
  return f;
}

const std::string& SummaryFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw IoError(path_.string() + ": missing key " + key);
  return it->second;
}

long SummaryFile::get_long(const std::string& key) const {
  const auto v = parse_optional_long(get(key));
  if (!v) throw IoError(path_.string() + ": " + key + " must be a number");
  return *v;
}

std::vector<std::string> SummaryFile::cells() const {
  std::vector<std::string> out;
  std::string_view list = get("cells");
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = trim(list.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<CellReport> build_report(const fs::path& out_dir) {
  const SummaryFile summary = SummaryFile::read(out_dir);
  const long episodes = summary.get_long("episodes_per_run");
  std::vector<CellReport> cells;
  for (const auto& name : summary.cells()) {
    CellReport cell;
    cell.name = name;
    const std::string p = "cell." + name + ".";
    cell.follower = summary.get(p + "follower");
    cell.range = parse_range(summary.get(p + "v_min") + "-" + summary.get(p + "v_max"));
    const long runs = summary.get_long(p + "runs");

    std::vector<std::vector<double>> series;
    for (int r = 0; r < runs; ++r) {
      const fs::path csv = out_dir / name / ("run_" + std::to_string(r)) / kEpisodesFile;
      if (!fs::exists(csv)) throw IoError("missing log " + csv.string());
      const auto rows = read_episode_csv(csv);
      if (static_cast<long>(rows.size()) != episodes)
        throw IoError(csv.string() + ": " + std::to_string(rows.size()) + " episodes logged, expected " +
                      std::to_string(episodes) + " (partial log)");
      long collisions = 0;
      std::optional<long> first;
      std::vector<double> min_th;
      for (long e = 0; e < episodes; ++e) {
        const auto& row = rows[static_cast<std::size_t>(e)];
        if (row.episode != e)
          throw IoError(csv.string() + ": line " + std::to_string(e + 2) + ": episode " +
                        std::to_string(row.episode) + " out of order");
        min_th.push_back(row.min_th);
        if (row.collision) {
          ++collisions;
          if (!first) first = e + 1;
        }
      }
      const std::string q = p + "run_" + std::to_string(r) + ".";
      if (summary.get_long(q + "collisions") != collisions ||
          parse_optional_long(summary.get(q + "episodes_to_first")) != first)
        throw IoError(csv.string() + " disagrees with " + (out_dir / kSummaryFile).string());
      cell.collisions.push_back(collisions);
      cell.first.push_back(first);
      series.push_back(std::move(min_th));
    }

    if (runs > 0) cell.stats = collision_stats(cell.collisions, cell.first);
    for (long e = 0; e < episodes && runs > 0; ++e) {
      double sum = 0.0;
      for (const auto& s : series) sum += s[static_cast<std::size_t>(e)];
      const double mean = sum / static_cast<double>(runs);
      double ss = 0.0;
      for (const auto& s : series) ss += (s[static_cast<std::size_t>(e)] - mean) * (s[static_cast<std::size_t>(e)] - mean);
      cell.min_th_mean.push_back(mean);
      cell.min_th_std.push_back(std::sqrt(ss / static_cast<double>(runs)));
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

fs::path write_report(const fs::path& out_dir) {
  const auto cells = build_report(out_dir);
  const fs::path dir = out_dir / "report";
  ensure_writable_directory(dir);

  std::ostringstream table;
  table << "follower,v_min,v_max,runs,mean_collisions,mean_episodes_to_first\n";
  for (const auto& c : cells) {
    std::ostringstream series;
    series << "episode,mean_min_th_s,std_min_th_s\n";
    for (std::size_t e = 0; e < c.min_th_mean.size(); ++e)
      series << e << ',' << format_double(c.min_th_mean[e]) << ',' << format_double(c.min_th_std[e]) << '\n';
    write_text_file(dir / ("min_th_" + c.name + ".csv"), series.str());
    table << c.follower << ',' << format_double(c.range.min) << ',' << format_double(c.range.max) << ','
          << c.collisions.size() << ',' << format_double(c.stats.mean_collisions) << ','
          << format_optional(c.stats.mean_episodes_to_first) << '\n';
  }
  write_text_file(dir / "collisions.csv", table.str());

  const fs::path baseline = out_dir / "baseline_stats.csv";
  if (fs::exists(baseline)) write_text_file(dir / "baseline.csv", read_text_file(baseline));
  return dir;
}

std::vector<CollisionReplay> extract_replays(const fs::path& run_dir, const std::string& cell, int run) {
  std::vector<CollisionReplay> out;
  for (const auto& row : read_episode_csv(run_dir / kEpisodesFile)) {
    if (!row.collision) continue;
    const fs::path path = replay_path(run_dir, row.episode);
    if (!fs::exists(path))
      throw IoError("missing trace " + path.string() + " for collision episode " +
                    std::to_string(row.episode) + " (were replays recorded?)");
    CollisionReplay replay{cell, run, row.episode, read_trace_csv(path)};
    if (replay.rows.empty() || replay.rows.back().info.gap > 0.0)
      throw IoError(path.string() + ": trace does not end in a collision");
    out.push_back(std::move(replay));
  }
  return out;
}

std::vector<CollisionReplay> extract_all_replays(const fs::path& out_dir) {
  const SummaryFile summary = SummaryFile::read(out_dir);
  std::vector<CollisionReplay> all;
  for (const auto& name : summary.cells()) {
    const long runs = summary.get_long("cell." + name + ".runs");
    for (int r = 0; r < runs; ++r) {
      auto replays = extract_replays(out_dir / name / ("run_" + std::to_string(r)), name, r);
      all.insert(all.end(), std::make_move_iterator(replays.begin()), std::make_move_iterator(replays.end()));
    }
  }
  return all;
}

fs::path write_replay_index(const fs::path& out_dir) {
  std::ostringstream out;
  out << "cell,run,episode,steps,final_gap_m,final_v_rel,trace\n";
  for (const auto& r : extract_all_replays(out_dir)) {
    const auto& last = r.rows.back().info;
    const fs::path trace = fs::path(r.cell) / ("run_" + std::to_string(r.run)) /
                           replay_path("", r.episode);
    out << r.cell << ',' << r.run << ',' << r.episode << ',' << r.rows.size() << ','
        << format_double(last.gap) << ',' << format_double(last.v_lead - last.v_follow) << ','
        << trace.generic_string() << '\n';
  }
  const fs::path path = out_dir / "replay_index.csv";
  write_text_file(path, out.str());
  return path;
}

}  // namespace arl::harness
