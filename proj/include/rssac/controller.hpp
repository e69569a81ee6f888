#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rssac/cost.hpp"
#include "rssac/dynamics.hpp"
#include "rssac/predictor.hpp"

namespace rssac {

/// Snapshot handed to a controller at a replanning instant.
struct PlanningInput {
  double t0 = 0.0;
  Vec4 robot = Vec4::Zero();
  std::vector<HumanHistory> humans;
  /// Cells until the next human observation (in [1, obs_ratio]).
  int first_jump_cell = 20;
  ReferenceTrajectory reference;
  std::uint64_t seed = 0;
};

/// Receding-horizon controller. plan() returns a schedule starting at input.t0;
/// the caller applies its first replan_cells() cells before calling again.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::string name() const = 0;
  virtual int replan_cells() const = 0;
  virtual ControlSchedule plan(const PlanningInput& input) = 0;
  /// Forget any schedule carried over from earlier calls.
  virtual void reset() {}
};

using ControllerFactory = std::function<std::unique_ptr<Controller>()>;

}  // namespace rssac
