#include "arl/harness/logs.hpp"

#include "arl/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace fs = std::filesystem;

namespace arl::harness {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

class FieldReader {
 public:
  FieldReader(const fs::path& path, long line) : path_(path), line_(line) {}

  double real(std::string_view s, std::string_view field) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(field, s);
    return v;
  }

  long integer(std::string_view s, std::string_view field) const {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(field, s);
    return v;
  }

  [[noreturn]] void fail(std::string_view field, std::string_view value) const {
    throw IoError(path_.string() + ": line " + std::to_string(line_) + ": bad " +
                  std::string(field) + " '" + std::string(value) + "'");
  }

 private:
  const fs::path& path_;
  long line_;
};

std::ifstream open_csv(const fs::path& path, std::string_view header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string first;
  if (!std::getline(in, first) || first != header)
    throw IoError(path.string() + ": line 1: expected header '" + std::string(header) + "'");
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("none");
}

void write_episode_row(std::ostream& out, const a2c::EpisodeRecord& rec) {
  out << rec.episode << ',' << format_double(rec.cof) << ',' << format_double(rec.min_headway)
      << ',' << format_double(rec.total_reward) << ',' << rec.steps << ','
      << (rec.collision ? 1 : 0) << ',';
  if (rec.collision_step) out << *rec.collision_step;
  out << '\n';
}

std::vector<EpisodeRow> read_episode_csv(const fs::path& path) {
  std::ifstream in = open_csv(path, kEpisodeHeader);
  std::vector<EpisodeRow> rows;
  std::string line;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = split(line);
    const FieldReader r(path, line_no);
    if (f.size() != 7) r.fail("row", line);
    EpisodeRow row;
    row.episode = r.integer(f[0], "episode");
    row.cof = r.real(f[1], "cof");
    row.min_th = r.real(f[2], "min_th_s");
    row.total_return = r.real(f[3], "return");
    row.steps = r.integer(f[4], "steps");
    const long flag = r.integer(f[5], "collision");
    if (flag != 0 && flag != 1) r.fail("collision", f[5]);
    row.collision = flag == 1;
    if (!f[6].empty()) row.collision_step = r.integer(f[6], "first_collision_step");
    if (row.collision != row.collision_step.has_value()) r.fail("first_collision_step", f[6]);
    rows.push_back(row);
  }
  return rows;
}

void write_trace_csv(const fs::path& path, std::span<const a2c::TraceRow> rows) {
  std::ostringstream out;
  out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    const auto& i = r.info;
    out << r.step << ',' << format_double(r.t_s) << ',' << format_double(i.v_lead) << ','
        << format_double(i.v_follow) << ',' << format_double(i.a_lead_cmd) << ','
        << format_double(i.a_lead_applied) << ',' << format_double(i.a_follow_cmd) << ','
        << format_double(i.a_follow_applied) << ',' << format_double(i.gap) << ','
        << format_double(i.t_h) << ',' << format_double(r.reward) << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<a2c::TraceRow> read_trace_csv(const fs::path& path) {
  std::ifstream in = open_csv(path, kTraceHeader);
  std::vector<a2c::TraceRow> rows;
  std::string line;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = split(line);
    const FieldReader r(path, line_no);
    if (f.size() != 11) r.fail("row", line);
    a2c::TraceRow row;
    row.step = r.integer(f[0], "step");
    row.t_s = r.real(f[1], "t_s");
    row.info.v_lead = r.real(f[2], "v_lead");
    row.info.v_follow = r.real(f[3], "v_follow");
    row.info.a_lead_cmd = r.real(f[4], "a_lead_cmd");
    row.info.a_lead_applied = r.real(f[5], "a_lead_applied");
    row.info.a_follow_cmd = r.real(f[6], "a_follow_cmd");
    row.info.a_follow_applied = r.real(f[7], "a_follow_applied");
    row.info.gap = r.real(f[8], "gap_m");
    row.info.t_h = r.real(f[9], "th_s");
    row.reward = r.real(f[10], "reward");
    rows.push_back(row);
  }
  return rows;
}

void ensure_writable_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!(out << "probe\n")) throw IoError("output directory is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace arl::harness
