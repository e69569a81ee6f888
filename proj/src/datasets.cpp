#include "rssac/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rssac {
namespace {

constexpr double kCanonicalFrameDt = 0.4;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool record_less(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  return a.frame != b.frame ? a.frame < b.frame : a.ped_id < b.ped_id;
}

}  // namespace

TrajectoryDataset::TrajectoryDataset(std::vector<TrajectoryRecord> records, double frame_dt)
    : frame_dt_(frame_dt), records_(std::move(records)) {
  require(std::abs(frame_dt - kCanonicalFrameDt) < 1e-9,
          "trajectory datasets must use a 0.4 s frame interval; resample before loading");
  std::sort(records_.begin(), records_.end(), record_less);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    require(std::isfinite(r.x) && std::isfinite(r.y), "non-finite position for pedestrian " + std::to_string(r.ped_id));
    if (i > 0) {
      const auto& p = records_[i - 1];
      require(p.frame != r.frame || p.ped_id != r.ped_id,
              "duplicate record for frame " + std::to_string(r.frame) + ", pedestrian " + std::to_string(r.ped_id));
    }
  }
}

int TrajectoryDataset::first_frame() const { return records_.empty() ? 0 : records_.front().frame; }
int TrajectoryDataset::last_frame() const { return records_.empty() ? 0 : records_.back().frame; }

std::pair<Vec2, Vec2> TrajectoryDataset::bounds() const {
  if (records_.empty()) return {Vec2::Zero(), Vec2::Zero()};
  Vec2 lo(records_[0].x, records_[0].y);
  Vec2 hi = lo;
  for (const auto& r : records_) {
    lo = lo.cwiseMin(Vec2(r.x, r.y));
    hi = hi.cwiseMax(Vec2(r.x, r.y));
  }
  return {lo, hi};
}

std::span<const TrajectoryRecord> TrajectoryDataset::at_frame(int frame) const {
  auto lo = std::lower_bound(records_.begin(), records_.end(), frame,
                             [](const TrajectoryRecord& r, int f) { return r.frame < f; });
  auto hi = std::upper_bound(lo, records_.end(), frame, [](int f, const TrajectoryRecord& r) { return f < r.frame; });
  return {lo, hi};
}

std::optional<Vec2> TrajectoryDataset::position(int ped_id, int frame) const {
  const TrajectoryRecord key{frame, ped_id, 0.0, 0.0};
  auto it = std::lower_bound(records_.begin(), records_.end(), key, record_less);
  if (it == records_.end() || it->frame != frame || it->ped_id != ped_id) return std::nullopt;
  return Vec2(it->x, it->y);
}

std::vector<int> TrajectoryDataset::pedestrians() const {
  std::vector<int> ids;
  for (const auto& r : records_) ids.push_back(r.ped_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::string TrajectoryDataset::serialize() const {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& r : records_) os << r.frame << ' ' << r.ped_id << ' ' << r.x << ' ' << r.y << '\n';
  return os.str();
}

TrajectoryDataset parse_trajectory_file(std::string_view text, double frame_dt) {
  std::vector<TrajectoryRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tokens = split_ws(line);
    const std::string where = "line " + std::to_string(line_no);
    require(tokens.size() == 4, where + ": expected 4 columns (frame ped_id x y), got " + std::to_string(tokens.size()));
    TrajectoryRecord r;
    require(parse_number(tokens[0], r.frame), where + ": invalid frame '" + std::string(tokens[0]) + "'");
    require(parse_number(tokens[1], r.ped_id), where + ": invalid pedestrian id '" + std::string(tokens[1]) + "'");
    require(parse_number(tokens[2], r.x), where + ": invalid x '" + std::string(tokens[2]) + "'");
    require(parse_number(tokens[3], r.y), where + ": invalid y '" + std::string(tokens[3]) + "'");
    require(std::isfinite(r.x) && std::isfinite(r.y), where + ": non-finite position");
    records.push_back(r);
  }
  return TrajectoryDataset(std::move(records), frame_dt);
}

TrajectoryDataset load_trajectory_file(const std::filesystem::path& path, double frame_dt) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open trajectory file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_trajectory_file(buffer.str(), frame_dt);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<HumanHistory> scene_window(const TrajectoryDataset& ds, int frame, int history_len, int future_len) {
  require(history_len >= 2, "scene_window: history_len must be at least 2");
  require(future_len >= 0, "scene_window: future_len must be nonnegative");
  std::vector<HumanHistory> out;
  for (const auto& rec : ds.at_frame(frame)) {
    HumanHistory h;
    h.id = rec.ped_id;
    for (int f = frame; f > frame - history_len; --f) {
      const auto p = ds.position(rec.ped_id, f);
      if (!p) break;
      h.positions.push_back(*p);
    }
    if (h.positions.size() < 2) continue;
    std::reverse(h.positions.begin(), h.positions.end());
    Vec2 last = h.positions.back();
    bool ended = false;
    for (int k = 1; k <= future_len; ++k) {
      const auto p = ended ? std::nullopt : ds.position(rec.ped_id, frame + k);
      if (!p) {
        ended = true;
        h.future.push_back(Vec2::Zero());
        continue;
      }
      h.future.push_back(*p - last);
      last = *p;
    }
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace rssac
