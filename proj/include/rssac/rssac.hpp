#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rssac/controller.hpp"
#include "rssac/cost.hpp"
#include "rssac/dynamics.hpp"
#include "rssac/predictor.hpp"

namespace rssac {

struct RssacConfig {
  double sigma = 0.0;
  int samples = 30;
  double t_calc = 0.1;
  double replan_interval = 0.1;
  double u_max = 5.0;
  std::vector<double> epsilons = {0.0, 1e-3, 2e-3, 4e-3, 8e-3, 1.6e-2, 2e-2, 4e-2, 8e-2};
  /// Nominal candidate magnitudes as fractions of u_max; each is combined with every heading.
  std::vector<double> nominal_magnitudes = {0.4, 0.8};
  int nominal_headings = 8;
  bool nominal_search = true;
  /// false gives the nominal-search-only baseline.
  bool perturb = true;

  void validate(const TimeGrid& grid) const;
  int t_calc_cells(const TimeGrid& grid) const;
  int replan_cells(const TimeGrid& grid) const;
  /// Number of nominal candidates including keep-previous.
  int nominal_candidate_count() const;
};

/// Insert v on (tau - epsilon, tau].
struct Perturbation {
  Vec2 v = Vec2::Zero();
  double tau = 0.0;
  double epsilon = 0.0;
};

/// Backward solution of the adjoint equation at every grid node of one sample.
struct AdjointTrajectory {
  std::vector<Vec4> rho;
};

/// Data of one planning cycle shared by every candidate schedule: the start
/// state, the reference on the grid and one human track per Monte Carlo sample.
struct PlanningContext {
  TimeGrid grid;
  CostParams cost;
  double t0 = 0.0;
  Vec4 x0 = Vec4::Zero();
  std::vector<Vec4> reference;
  std::vector<HumanTrack> tracks;

  int cells() const { return grid.cells(); }
};

PlanningContext make_context(const PlanningInput& input, const HumanTransitionSamples& samples,
                             const TimeGrid& grid, const CostParams& cost);

/// Cost J of every sample under schedule u; the robot trajectory is shared.
std::vector<double> sample_costs(const PlanningContext& ctx, const ControlSchedule& u);
double schedule_risk(const PlanningContext& ctx, const ControlSchedule& u, double sigma);

AdjointTrajectory adjoint_rollout(std::span<const Vec4> robot, const ControlSchedule& u, const HumanTrack& humans,
                                  std::span<const Vec4> ref, const CostParams& cost);

/// Mode insertion gradient of the entropic risk for inserting v just before tau,
/// given the risk-weighted adjoint at tau. u is the nominal input being replaced
/// and u_energy its time-averaged |u|^2 (equal to |u|^2 for an unsplit cell).
double entropic_mig(const Vec2& v, const Vec4& weighted_rho, const Vec4& x, const Vec2& u, double u_energy,
                    double r);
double entropic_mig(const Vec2& v, const Vec4& weighted_rho, const Vec4& x, const Vec2& u, double r);

struct ActionChoice {
  Vec2 v = Vec2::Zero();
  double mig = 0.0;
};

/// Closed-form minimiser of the MIG over the disk |v| <= u_max (R = r I).
ActionChoice optimal_action(const Vec4& weighted_rho, const Vec4& x, const Vec2& u, double u_energy, double r,
                            double u_max);
ActionChoice optimal_action(const Vec4& weighted_rho, const Vec4& x, const Vec2& u, double r, double u_max);

struct PerturbationChoice {
  Vec2 v = Vec2::Zero();
  int node = 0;
  double tau = 0.0;
  double mig = 0.0;
};

/// Minimises the MIG over (v, tau) with tau on grid nodes first_node..cells-1.
/// A perturbation at node k replaces cell k - 1. Ties go to the earliest tau.
PerturbationChoice optimize_perturbation(std::span<const Vec4> weighted_rho, std::span<const Vec4> robot,
                                         const ControlSchedule& u, const CostParams& cost, int first_node);

/// Applies v on (tau - epsilon, tau]. Whole cells ending at tau are replaced and
/// a leftover fraction of a cell is blended into the preceding cell. Cells before
/// first_mutable_cell are never touched.
ControlSchedule perturb_schedule(const ControlSchedule& u, const Vec2& v, double tau, double epsilon,
                                 std::size_t first_mutable_cell = 0);

struct EpsilonSearchResult {
  double epsilon = 0.0;
  double risk = 0.0;
  std::vector<double> risks;
};

/// Re-simulates every epsilon candidate on the shared samples and keeps the
/// lowest-risk one (ties to the smallest epsilon).
EpsilonSearchResult epsilon_search(const PlanningContext& ctx, const ControlSchedule& u, const Vec2& v, double tau,
                                   const RssacConfig& cfg);

/// The constant nominal candidates, in heading-major order per magnitude.
std::vector<Vec2> nominal_candidates(const RssacConfig& cfg);

/// Candidate schedules: index 0 keeps the previous schedule, index i >= 1 splices
/// constant i-1 into [t0 + t_calc, t0 + t_calc + dt_o).
std::vector<ControlSchedule> nominal_candidate_schedules(const ControlSchedule& u_prev, const RssacConfig& cfg,
                                                         const TimeGrid& grid);

struct NominalSearchResult {
  ControlSchedule schedule;
  int choice = 0;
  std::vector<double> risks;
};

NominalSearchResult nominal_search(const PlanningContext& ctx, const ControlSchedule& u_prev,
                                   const RssacConfig& cfg);

/// Per-sample costs and adjoints of the nominal schedule and the risk-weighted
/// adjoint at every node.
struct WeightedAdjoint {
  std::vector<Vec4> robot;
  std::vector<double> costs;
  std::vector<AdjointTrajectory> adjoints;
  std::vector<Vec4> weighted_rho;
};

WeightedAdjoint risk_weighted_adjoint(const PlanningContext& ctx, const ControlSchedule& u, double sigma);

/// Mode-insertion optimisation followed by the epsilon search, given the weighted adjoint.
struct PerturbationResult {
  Perturbation perturbation;
  double mig = 0.0;
  ControlSchedule schedule;
};

PerturbationResult perturb_nominal(const PlanningContext& ctx, const ControlSchedule& u_nominal,
                                   std::span<const Vec4> robot, std::span<const Vec4> weighted_rho,
                                   const RssacConfig& cfg);

struct StepReport {
  int nominal_choice = 0;
  double nominal_risk = 0.0;
  double mig = 0.0;
  Perturbation perturbation;
  bool fallback = false;
};

/// One control cycle. u_prev may be null on the first call.
ControlSchedule rssac_step(const PlanningInput& input, const ControlSchedule* u_prev, const Predictor& predictor,
                           const RssacConfig& cfg, const CostParams& cost, const TimeGrid& grid,
                           StepReport* report = nullptr);

class RssacController final : public Controller {
 public:
  RssacController(RssacConfig cfg, CostParams cost, TimeGrid grid, std::shared_ptr<const Predictor> predictor);

  std::string name() const override { return cfg_.perturb ? "rssac" : "nominal_only"; }
  int replan_cells() const override { return cfg_.replan_cells(grid_); }
  ControlSchedule plan(const PlanningInput& input) override;
  void reset() override { previous_.reset(); }

  const StepReport& last_report() const { return report_; }

 private:
  RssacConfig cfg_;
  CostParams cost_;
  TimeGrid grid_;
  std::shared_ptr<const Predictor> predictor_;
  std::optional<ControlSchedule> previous_;
  StepReport report_;
};

}  // namespace rssac
