#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "rssac/rssac.hpp"

namespace rssac {

/// Applies zero acceleration forever.
class ZeroController final : public Controller {
 public:
  ZeroController(TimeGrid grid, double u_max, int replan_cells = 5);
  std::string name() const override { return "zero"; }
  int replan_cells() const override { return replan_cells_; }
  ControlSchedule plan(const PlanningInput& input) override;

 private:
  TimeGrid grid_;
  double u_max_;
  int replan_cells_;
};

struct ExhaustiveConfig {
  int depth = 4;
  /// Fractions of u_max; zero is a single action regardless of heading.
  std::vector<double> magnitudes = {0.0, 0.6};
  int headings = 8;
  double t_calc = 0.4;
  double replan_interval = 0.4;
  double sigma = 0.0;
  int samples = 30;
  double u_max = 5.0;

  void validate(const TimeGrid& grid) const;
};

/// Tree search over constant motion primitives held for one observation interval
/// each, scored by the entropic risk over common samples.
class ExhaustiveTreeSearchController final : public Controller {
 public:
  ExhaustiveTreeSearchController(ExhaustiveConfig cfg, CostParams cost, TimeGrid grid,
                                 std::shared_ptr<const Predictor> predictor);

  std::string name() const override { return "exhaustive"; }
  int replan_cells() const override;
  ControlSchedule plan(const PlanningInput& input) override;
  void reset() override { previous_.reset(); }

  const std::vector<Vec2>& actions() const { return actions_; }
  /// Leaves scored by the last plan() call.
  long long last_sequence_count() const { return last_count_; }
  double last_best_risk() const { return last_best_risk_; }
  const std::vector<int>& last_best_sequence() const { return last_best_; }

  /// Same search on an explicit context; returns the best schedule.
  ControlSchedule search(const PlanningContext& ctx, const ControlSchedule& prefix);

 private:
  ExhaustiveConfig cfg_;
  CostParams cost_;
  TimeGrid grid_;
  std::shared_ptr<const Predictor> predictor_;
  std::vector<Vec2> actions_;
  std::optional<ControlSchedule> previous_;
  long long last_count_ = 0;
  double last_best_risk_ = 0.0;
  std::vector<int> last_best_;
};

std::vector<Vec2> exhaustive_actions(const ExhaustiveConfig& cfg);

std::unique_ptr<Controller> make_nominal_only_controller(RssacConfig cfg, const CostParams& cost,
                                                         const TimeGrid& grid,
                                                         std::shared_ptr<const Predictor> predictor);

}  // namespace rssac
