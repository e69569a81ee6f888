#include "rssac/rssac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rssac/parallel.hpp"
#include "rssac/risk.hpp"

namespace rssac {
namespace {

int to_cells(double duration, double dt, const char* what) {
  const double ratio = duration / dt;
  const double rounded = std::round(ratio);
  require(std::abs(ratio - rounded) < 1e-6, std::string(what) + " must be a whole number of control steps");
  return static_cast<int>(rounded);
}

ControlSchedule shift_previous(const ControlSchedule* u_prev, double t0, const TimeGrid& grid, double u_max) {
  const auto cells = static_cast<std::size_t>(grid.cells());
  if (u_prev == nullptr || u_prev->size() != cells || u_prev->dt() != grid.dt_c || u_prev->u_max() != u_max) {
    return ControlSchedule::zeros(t0, grid.dt_c, cells, u_max);
  }
  const double offset = (t0 - u_prev->t0()) / grid.dt_c;
  const long shift = std::lround(offset);
  if (shift < 0 || std::abs(offset - static_cast<double>(shift)) > 1e-6) {
    return ControlSchedule::zeros(t0, grid.dt_c, cells, u_max);
  }
  ControlSchedule out = u_prev->shifted(static_cast<std::size_t>(shift));
  out.set_t0(t0);
  return out;
}

}  // namespace

void RssacConfig::validate(const TimeGrid& grid) const {
  require(sigma >= 0.0 && std::isfinite(sigma), "rssac.sigma must be nonnegative");
  require(samples >= 1, "rssac.samples must be at least 1");
  require(u_max > 0.0, "rssac.u_max must be positive");
  require(t_calc >= 0.0 && replan_interval > 0.0, "rssac.t_calc and rssac.replan_interval must be positive");
  require(t_calc <= replan_interval + 1e-12, "rssac.t_calc must not exceed rssac.replan_interval");
  const int tc = t_calc_cells(grid);
  require(tc + 1 < grid.cells(), "rssac.t_calc leaves no room for a perturbation inside the horizon");
  replan_cells(grid);
  require(!epsilons.empty(), "rssac.epsilons must not be empty");
  require(epsilons.front() == 0.0, "rssac.epsilons must start with 0");
  for (std::size_t i = 1; i < epsilons.size(); ++i) {
    require(epsilons[i] > epsilons[i - 1], "rssac.epsilons must be strictly increasing");
  }
  for (double a : nominal_magnitudes) require(a >= 0.0 && a <= 1.0, "rssac.nominal_magnitudes must lie in [0, 1]");
  require(nominal_headings >= 1, "rssac.nominal_headings must be positive");
}

int RssacConfig::t_calc_cells(const TimeGrid& grid) const { return to_cells(t_calc, grid.dt_c, "rssac.t_calc"); }

int RssacConfig::replan_cells(const TimeGrid& grid) const {
  const int n = to_cells(replan_interval, grid.dt_c, "rssac.replan_interval");
  require(n >= 1, "rssac.replan_interval must be at least one control step");
  return n;
}

int RssacConfig::nominal_candidate_count() const {
  return static_cast<int>(nominal_magnitudes.size()) * nominal_headings + 1;
}

PlanningContext make_context(const PlanningInput& input, const HumanTransitionSamples& samples,
                             const TimeGrid& grid, const CostParams& cost) {
  require(samples.humans() == static_cast<int>(input.humans.size()), "samples do not match the scene");
  require(samples.steps() == grid.horizon_steps, "samples do not cover the horizon");
  require(input.first_jump_cell >= 1 && input.first_jump_cell <= grid.obs_ratio,
          "first_jump_cell must lie in [1, obs_ratio]");
  PlanningContext ctx;
  ctx.grid = grid;
  ctx.cost = cost;
  ctx.t0 = input.t0;
  ctx.x0 = input.robot;
  ctx.reference = input.reference.sample(input.t0, grid.dt_c, grid.cells() + 1);
  std::vector<Vec2> initial;
  initial.reserve(input.humans.size());
  for (const auto& h : input.humans) {
    require(!h.positions.empty(), "human " + std::to_string(h.id) + " has no observed position");
    initial.push_back(h.positions.back());
  }
  ctx.tracks.reserve(static_cast<std::size_t>(samples.samples()));
  for (int j = 0; j < samples.samples(); ++j) {
    ctx.tracks.emplace_back(initial, samples.sample(j), grid.horizon_steps, grid, input.first_jump_cell);
  }
  return ctx;
}

std::vector<double> sample_costs(const PlanningContext& ctx, const ControlSchedule& u) {
  require(static_cast<int>(u.size()) == ctx.cells(), "schedule does not match the planning grid");
  const std::vector<Vec4> robot = robot_rollout(ctx.x0, u);
  const double tracking = tracking_cost(robot, u, ctx.reference, ctx.cost);
  std::vector<double> costs(ctx.tracks.size());
  parallel_for(costs.size(), [&](std::size_t j) {
    costs[j] = tracking + collision_total(robot, ctx.tracks[j], u.dt(), ctx.cost);
  });
  return costs;
}

double schedule_risk(const PlanningContext& ctx, const ControlSchedule& u, double sigma) {
  return entropic_risk(sample_costs(ctx, u), sigma);
}

AdjointTrajectory adjoint_rollout(std::span<const Vec4> robot, const ControlSchedule& u, const HumanTrack& humans,
                                  std::span<const Vec4> ref, const CostParams& cost) {
  require(!robot.empty(), "adjoint: empty trajectory");
  const int cells = static_cast<int>(robot.size()) - 1;
  require(static_cast<int>(u.size()) >= cells && static_cast<int>(ref.size()) >= cells + 1,
          "adjoint: grid mismatch");
  const double dt = u.dt();
  AdjointTrajectory out;
  out.rho.resize(robot.size());
  int block = humans.block_of_cell(cells);
  out.rho[static_cast<std::size_t>(cells)] =
      terminal_cost_state_gradient(robot[static_cast<std::size_t>(cells)], humans.block(block),
                                   ref[static_cast<std::size_t>(cells)], cost);
  // Exact discrete adjoint of the Euler / left-rectangle cost:
  // rho_k = rho_{k+1} + dt (dc/dx(x_k) + A^T rho_{k+1}).
  for (int k = cells - 1; k >= 0; --k) {
    while (block > 0 && humans.block_start(block) > k) --block;
    const auto kk = static_cast<std::size_t>(k);
    const Vec4& next = out.rho[kk + 1];
    const Vec4 grad = running_cost_state_gradient(robot[kk], humans.block(block), ref[kk], cost);
    out.rho[kk] = next + dt * (grad + drift_jacobian(robot[kk]).transpose() * next);
  }
  return out;
}

double entropic_mig(const Vec2& v, const Vec4& weighted_rho, const Vec4& x, const Vec2& u, double u_energy,
                    double r) {
  return 0.5 * r * v.squaredNorm() + weighted_rho.dot(input_matrix(x) * (v - u)) - 0.5 * r * u_energy;
}

double entropic_mig(const Vec2& v, const Vec4& weighted_rho, const Vec4& x, const Vec2& u, double r) {
  return entropic_mig(v, weighted_rho, x, u, u.squaredNorm(), r);
}

ActionChoice optimal_action(const Vec4& weighted_rho, const Vec4& x, const Vec2& u, double u_energy, double r,
                            double u_max) {
  require(r > 0.0, "optimal_action: control weight must be positive");
  Vec2 v = -(input_matrix(x).transpose() * weighted_rho) / r;
  const double norm = v.norm();
  if (norm > u_max) v *= u_max / norm;
  ActionChoice best{v, entropic_mig(v, weighted_rho, x, u, u_energy, r)};
  // u itself is feasible; guards against rounding when v* coincides with u.
  const double keep = entropic_mig(u, weighted_rho, x, u, u_energy, r);
  if (keep < best.mig) best = {u, keep};
  return best;
}

ActionChoice optimal_action(const Vec4& weighted_rho, const Vec4& x, const Vec2& u, double r, double u_max) {
  return optimal_action(weighted_rho, x, u, u.squaredNorm(), r, u_max);
}

PerturbationChoice optimize_perturbation(std::span<const Vec4> weighted_rho, std::span<const Vec4> robot,
                                         const ControlSchedule& u, const CostParams& cost, int first_node) {
  const int cells = static_cast<int>(u.size());
  require(weighted_rho.size() == robot.size() && static_cast<int>(robot.size()) == cells + 1,
          "optimize_perturbation: grid mismatch");
  require(first_node >= 1 && first_node < cells, "optimize_perturbation: empty set of application times");
  PerturbationChoice best;
  bool found = false;
  for (int k = first_node; k < cells; ++k) {
    const auto cell = static_cast<std::size_t>(k - 1);
    const ActionChoice a = optimal_action(weighted_rho[static_cast<std::size_t>(k)], robot[static_cast<std::size_t>(k)],
                                          u.input(cell), u.energy(cell), cost.control_weight, u.u_max());
    if (!found || a.mig < best.mig) {
      best = {a.v, k, u.t0() + u.dt() * k, a.mig};
      found = true;
    }
  }
  return best;
}

ControlSchedule perturb_schedule(const ControlSchedule& u, const Vec2& v, double tau, double epsilon,
                                 std::size_t first_mutable_cell) {
  require(epsilon >= 0.0 && std::isfinite(epsilon), "perturbation duration must be nonnegative");
  ControlSchedule out = u;
  if (epsilon == 0.0) return out;
  const double node_real = (tau - u.t0()) / u.dt();
  const long node = std::lround(node_real);
  require(std::abs(node_real - static_cast<double>(node)) < 1e-6 && node >= 1 &&
              node <= static_cast<long>(u.size()),
          "perturbation time must be a grid node inside the schedule");
  const double span_cells = epsilon / u.dt();
  long full = static_cast<long>(std::floor(span_cells + 1e-9));
  double fraction = span_cells - static_cast<double>(full);
  if (fraction < 1e-9) fraction = 0.0;
  const long floor_cell = static_cast<long>(first_mutable_cell);
  for (long i = 1; i <= full; ++i) {
    const long cell = node - i;
    if (cell < floor_cell) return out;
    out.set_input(static_cast<std::size_t>(cell), v);
  }
  const long partial = node - full - 1;
  if (fraction > 0.0 && partial >= floor_cell) out.blend_cell(static_cast<std::size_t>(partial), v, fraction);
  return out;
}

EpsilonSearchResult epsilon_search(const PlanningContext& ctx, const ControlSchedule& u, const Vec2& v, double tau,
                                   const RssacConfig& cfg) {
  require(!cfg.epsilons.empty(), "epsilon_search: empty candidate set");
  const auto protect = static_cast<std::size_t>(cfg.t_calc_cells(ctx.grid));
  EpsilonSearchResult out;
  out.risks.reserve(cfg.epsilons.size());
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    const double eps = cfg.epsilons[i];
    const double risk = schedule_risk(ctx, perturb_schedule(u, v, tau, eps, protect), cfg.sigma);
    out.risks.push_back(risk);
    if (i == 0 || risk < out.risk) {
      out.risk = risk;
      out.epsilon = eps;
    }
  }
  return out;
}

std::vector<Vec2> nominal_candidates(const RssacConfig& cfg) {
  std::vector<Vec2> out;
  for (double a : cfg.nominal_magnitudes) {
    for (int h = 0; h < cfg.nominal_headings; ++h) {
      const double theta = 2.0 * std::numbers::pi * h / cfg.nominal_headings;
      out.emplace_back(a * cfg.u_max * std::cos(theta), a * cfg.u_max * std::sin(theta));
    }
  }
  return out;
}

std::vector<ControlSchedule> nominal_candidate_schedules(const ControlSchedule& u_prev, const RssacConfig& cfg,
                                                         const TimeGrid& grid) {
  const int first = cfg.t_calc_cells(grid);
  const int last = std::min(first + grid.obs_ratio, static_cast<int>(u_prev.size()));
  std::vector<ControlSchedule> out;
  out.push_back(u_prev);
  for (const Vec2& c : nominal_candidates(cfg)) {
    ControlSchedule s = u_prev;
    for (int k = first; k < last; ++k) s.set_input(static_cast<std::size_t>(k), c);
    out.push_back(std::move(s));
  }
  return out;
}

NominalSearchResult nominal_search(const PlanningContext& ctx, const ControlSchedule& u_prev,
                                   const RssacConfig& cfg) {
  std::vector<ControlSchedule> candidates = nominal_candidate_schedules(u_prev, cfg, ctx.grid);
  NominalSearchResult out;
  out.risks.reserve(candidates.size());
  double best = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double risk = schedule_risk(ctx, candidates[i], cfg.sigma);
    out.risks.push_back(risk);
    if (i == 0 || risk < best) {
      best = risk;
      out.choice = static_cast<int>(i);
    }
  }
  out.schedule = std::move(candidates[static_cast<std::size_t>(out.choice)]);
  return out;
}

WeightedAdjoint risk_weighted_adjoint(const PlanningContext& ctx, const ControlSchedule& u, double sigma) {
  require(static_cast<int>(u.size()) == ctx.cells(), "schedule does not match the planning grid");
  WeightedAdjoint out;
  out.robot = robot_rollout(ctx.x0, u);
  const double tracking = tracking_cost(out.robot, u, ctx.reference, ctx.cost);
  const std::size_t m = ctx.tracks.size();
  out.costs.resize(m);
  out.adjoints.resize(m);
  parallel_for(m, [&](std::size_t j) {
    out.costs[j] = tracking + collision_total(out.robot, ctx.tracks[j], u.dt(), ctx.cost);
    out.adjoints[j] = adjoint_rollout(out.robot, u, ctx.tracks[j], ctx.reference, ctx.cost);
  });
  const std::vector<double> weights = risk_likelihood_ratios(out.costs, sigma);
  out.weighted_rho.resize(out.robot.size());
  std::vector<Vec4> column(m);
  for (std::size_t k = 0; k < out.robot.size(); ++k) {
    for (std::size_t j = 0; j < m; ++j) column[j] = out.adjoints[j].rho[k];
    out.weighted_rho[k] = weighted_adjoint(weights, column);
  }
  return out;
}

PerturbationResult perturb_nominal(const PlanningContext& ctx, const ControlSchedule& u_nominal,
                                   std::span<const Vec4> robot, std::span<const Vec4> weighted_rho,
                                   const RssacConfig& cfg) {
  const int protect = cfg.t_calc_cells(ctx.grid);
  const PerturbationChoice choice = optimize_perturbation(weighted_rho, robot, u_nominal, ctx.cost, protect + 1);
  PerturbationResult out;
  out.mig = choice.mig;
  out.perturbation = {choice.v, choice.tau, 0.0};
  if (choice.mig < 0.0) {
    out.perturbation.epsilon = epsilon_search(ctx, u_nominal, choice.v, choice.tau, cfg).epsilon;
  }
  out.schedule = perturb_schedule(u_nominal, choice.v, choice.tau, out.perturbation.epsilon,
                                  static_cast<std::size_t>(protect));
  return out;
}

ControlSchedule rssac_step(const PlanningInput& input, const ControlSchedule* u_prev, const Predictor& predictor,
                           const RssacConfig& cfg, const CostParams& cost, const TimeGrid& grid,
                           StepReport* report) {
  StepReport local;
  StepReport& rep = report != nullptr ? *report : local;
  rep = StepReport{};
  const ControlSchedule shifted = shift_previous(u_prev, input.t0, grid, cfg.u_max);
  try {
    cfg.validate(grid);
    cost.validate();
    const HumanTransitionSamples samples =
        predictor.sample(input.humans, cfg.samples, grid.horizon_steps, input.seed);
    PlanningContext ctx = make_context(input, samples, grid, cost);

    ControlSchedule nominal = shifted;
    if (cfg.nominal_search) {
      if (predictor.conditional()) {
        // Each candidate gets its own conditional sample set; keep the winner's.
        std::vector<ControlSchedule> candidates = nominal_candidate_schedules(shifted, cfg, grid);
        double best = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          const std::vector<Vec4> plan = robot_rollout(input.robot, candidates[i]);
          const RobotPlan conditioning{input.t0, grid.dt_c, plan};
          PlanningContext cand = make_context(
              input, predictor.sample(input.humans, cfg.samples, grid.horizon_steps, input.seed, &conditioning),
              grid, cost);
          const double risk = schedule_risk(cand, candidates[i], cfg.sigma);
          if (i == 0 || risk < best) {
            best = risk;
            rep.nominal_choice = static_cast<int>(i);
            ctx = std::move(cand);
          }
        }
        rep.nominal_risk = best;
        nominal = candidates[static_cast<std::size_t>(rep.nominal_choice)];
      } else {
        NominalSearchResult ns = nominal_search(ctx, shifted, cfg);
        rep.nominal_choice = ns.choice;
        rep.nominal_risk = ns.risks[static_cast<std::size_t>(ns.choice)];
        nominal = std::move(ns.schedule);
      }
    }
    if (!cfg.perturb) return nominal;

    const WeightedAdjoint wa = risk_weighted_adjoint(ctx, nominal, cfg.sigma);
    PerturbationResult pr = perturb_nominal(ctx, nominal, wa.robot, wa.weighted_rho, cfg);
    rep.mig = pr.mig;
    rep.perturbation = pr.perturbation;
    return std::move(pr.schedule);
  } catch (const std::exception&) {
    rep.fallback = true;
    return shifted;
  }
}

RssacController::RssacController(RssacConfig cfg, CostParams cost, TimeGrid grid,
                                 std::shared_ptr<const Predictor> predictor)
    : cfg_(std::move(cfg)), cost_(cost), grid_(grid), predictor_(std::move(predictor)) {
  require(predictor_ != nullptr, "rssac controller needs a predictor");
  cfg_.validate(grid_);
  cost_.validate();
}

ControlSchedule RssacController::plan(const PlanningInput& input) {
  ControlSchedule next =
      rssac_step(input, previous_ ? &*previous_ : nullptr, *predictor_, cfg_, cost_, grid_, &report_);
  previous_ = next;
  return next;
}

}  // namespace rssac
