#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "rssac/datasets.hpp"

using namespace rssac;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_trajectory_file(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

TrajectoryDataset random_dataset(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> start(0, 20), len(1, 15), gap(0, 4);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::vector<TrajectoryRecord> recs;
  for (int id = 1; id <= 6; ++id) {
    int f = start(rng);
    for (int seg = 0; seg < 2; ++seg) {
      const int n = len(rng);
      for (int k = 0; k < n; ++k, ++f) recs.push_back({f, id, pos(rng), pos(rng)});
      f += gap(rng);
    }
  }
  return TrajectoryDataset(std::move(recs));
}

/// Straightforward re-derivation of a scene window by scanning every record.
std::vector<HumanHistory> window_oracle(const TrajectoryDataset& ds, int frame, int hist, int fut) {
  auto find = [&](int id, int f) -> const TrajectoryRecord* {
    for (const auto& r : ds.records())
      if (r.ped_id == id && r.frame == f) return &r;
    return nullptr;
  };
  std::vector<HumanHistory> out;
  for (int id : ds.pedestrians()) {
    if (!find(id, frame)) continue;
    HumanHistory h;
    h.id = id;
    int first = frame;
    while (first - 1 > frame - hist && find(id, first - 1)) --first;
    for (int f = first; f <= frame; ++f) h.positions.emplace_back(find(id, f)->x, find(id, f)->y);
    if (h.positions.size() < 2) continue;
    int f = frame;
    for (int k = 0; k < fut; ++k) {
      const auto* a = find(id, f);
      const auto* b = find(id, f + 1);
      if (a && b && f == frame + k) {
        h.future.emplace_back(b->x - a->x, b->y - a->y);
        ++f;
      } else {
        h.future.push_back(Vec2::Zero());
      }
    }
    out.push_back(h);
  }
  return out;
}

}  // namespace

TEST_CASE("parse sorts records and ignores comments and blank lines") {
  const auto ds = parse_trajectory_file("# frame id x y\n2 1 0.5 1.5\n\n1 2 3 4\n1 1 -1 -2\n");
  REQUIRE(ds.size() == 3);
  CHECK(ds.records()[0] == TrajectoryRecord{1, 1, -1.0, -2.0});
  CHECK(ds.records()[1] == TrajectoryRecord{1, 2, 3.0, 4.0});
  CHECK(ds.records()[2] == TrajectoryRecord{2, 1, 0.5, 1.5});
  CHECK(ds.first_frame() == 1);
  CHECK(ds.last_frame() == 2);
  CHECK(ds.at_frame(1).size() == 2);
  CHECK(ds.at_frame(7).empty());
  CHECK(ds.position(1, 2).value() == Vec2(0.5, 1.5));
  CHECK_FALSE(ds.position(2, 2).has_value());
  CHECK(ds.pedestrians() == std::vector<int>{1, 2});
  const auto [lo, hi] = ds.bounds();
  CHECK(lo == Vec2(-1.0, -2.0));
  CHECK(hi == Vec2(3.0, 4.0));
}

TEST_CASE("malformed lines report their line number") {
  CHECK(error_of("1 1 0 0\n2 1 0\n").find("line 2") != std::string::npos);
  CHECK(error_of("# c\n\n1 x 0 0\n").find("line 3") != std::string::npos);
  CHECK(error_of("1 1 0 nan\n").find("line 1") != std::string::npos);
  CHECK(error_of("1.5 1 0 0\n").find("invalid frame") != std::string::npos);
  CHECK(error_of("1 1 0 0\n1 1 2 2\n").find("duplicate") != std::string::npos);
  CHECK_THROWS_AS(parse_trajectory_file("1 1 0 0\n", 0.1), Error);
}

TEST_CASE("missing file names the path") {
  try {
    load_trajectory_file("/nonexistent/tracks.txt");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/tracks.txt") != std::string::npos);
  }
}

TEST_CASE("serialize and parse round-trip exactly") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ds = random_dataset(rng);
    CHECK(parse_trajectory_file(ds.serialize()) == ds);
  }
  const auto tmp = std::filesystem::temp_directory_path() / "rssac_roundtrip.txt";
  const auto ds = random_dataset(rng);
  std::ofstream(tmp) << ds.serialize();
  CHECK(load_trajectory_file(tmp) == ds);
  std::filesystem::remove(tmp);
}

TEST_CASE("scene window matches a linear-scan oracle") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto ds = random_dataset(rng);
    for (int frame = ds.first_frame(); frame <= ds.last_frame(); ++frame) {
      const auto got = scene_window(ds, frame, 8, 12);
      const auto want = window_oracle(ds, frame, 8, 12);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].id == want[i].id);
        CHECK(got[i].positions == want[i].positions);
        CHECK(got[i].future == want[i].future);
      }
    }
  }
}

TEST_CASE("scene window futures extend as prefixes") {
  std::mt19937_64 rng(13);
  const auto ds = random_dataset(rng);
  for (int frame = ds.first_frame(); frame <= ds.last_frame(); ++frame) {
    const auto short_w = scene_window(ds, frame, 8, 4);
    const auto long_w = scene_window(ds, frame, 8, 10);
    REQUIRE(short_w.size() == long_w.size());
    for (std::size_t i = 0; i < short_w.size(); ++i) {
      CHECK(long_w[i].future.size() == 10);
      for (std::size_t k = 0; k < 4; ++k) CHECK(short_w[i].future[k] == long_w[i].future[k]);
    }
  }
}

TEST_CASE("scene window skips pedestrians without two history points") {
  const auto ds = parse_trajectory_file("1 1 0 0\n2 1 1 0\n2 2 5 5\n3 1 2 0\n");
  const auto w = scene_window(ds, 2, 8, 3);
  REQUIRE(w.size() == 1);
  CHECK(w[0].id == 1);
  CHECK(w[0].future[0] == Vec2(1.0, 0.0));
  CHECK(w[0].future[1] == Vec2::Zero());
  CHECK(w[0].future[2] == Vec2::Zero());
  CHECK_THROWS_AS(scene_window(ds, 2, 1, 3), Error);
}
