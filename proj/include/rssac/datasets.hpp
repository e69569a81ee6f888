#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rssac/predictor.hpp"

namespace rssac {

/// One row of a pedestrian trajectory file: frame index, pedestrian id, position in meters.
struct TrajectoryRecord {
  int frame = 0;
  int ped_id = 0;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const TrajectoryRecord&) const = default;
};

/// Pedestrian tracks indexed by frame. Consecutive frames are frame_dt apart.
class TrajectoryDataset {
 public:
  TrajectoryDataset() = default;
  explicit TrajectoryDataset(std::vector<TrajectoryRecord> records, double frame_dt = 0.4);

  double frame_dt() const { return frame_dt_; }
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }
  const std::vector<TrajectoryRecord>& records() const { return records_; }
  int first_frame() const;
  int last_frame() const;
  /// Axis-aligned bounds of all positions as (min, max); zero for an empty dataset.
  std::pair<Vec2, Vec2> bounds() const;

  /// Records at one frame, sorted by pedestrian id.
  std::span<const TrajectoryRecord> at_frame(int frame) const;
  std::optional<Vec2> position(int ped_id, int frame) const;
  std::vector<int> pedestrians() const;

  /// Canonical text form: one "frame ped_id x y" line per record, frame-major.
  std::string serialize() const;

  bool operator==(const TrajectoryDataset& other) const {
    return frame_dt_ == other.frame_dt_ && records_ == other.records_;
  }

 private:
  double frame_dt_ = 0.4;
  std::vector<TrajectoryRecord> records_;
};

/// Parses whitespace-separated "frame ped_id x y" lines; '#' starts a comment line.
TrajectoryDataset parse_trajectory_file(std::string_view text, double frame_dt = 0.4);
TrajectoryDataset load_trajectory_file(const std::filesystem::path& path, double frame_dt = 0.4);

/// Pedestrians present at `frame` with at least two contiguous history points.
/// History holds up to history_len positions ending at `frame`; the future holds
/// exactly future_len displacements and is zero after the track ends.
std::vector<HumanHistory> scene_window(const TrajectoryDataset& ds, int frame, int history_len, int future_len);

}  // namespace rssac
