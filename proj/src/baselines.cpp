#include "rssac/baselines.hpp"

#include <cmath>
#include <numbers>

#include "rssac/risk.hpp"

namespace rssac {
namespace {

int whole_cells(double duration, double dt, const char* what) {
  const double ratio = duration / dt;
  require(std::abs(ratio - std::round(ratio)) < 1e-6, std::string(what) + " must be a whole number of control steps");
  return static_cast<int>(std::lround(ratio));
}

}  // namespace

ZeroController::ZeroController(TimeGrid grid, double u_max, int replan_cells)
    : grid_(grid), u_max_(u_max), replan_cells_(replan_cells) {
  require(replan_cells >= 1, "zero controller: replanning interval must be positive");
}

ControlSchedule ZeroController::plan(const PlanningInput& input) {
  return ControlSchedule::zeros(input.t0, grid_.dt_c, static_cast<std::size_t>(grid_.cells()), u_max_);
}

void ExhaustiveConfig::validate(const TimeGrid& grid) const {
  require(depth >= 1, "exhaustive.depth must be positive");
  require(headings >= 1, "exhaustive.headings must be positive");
  require(!magnitudes.empty(), "exhaustive.magnitudes must not be empty");
  for (double a : magnitudes) require(a >= 0.0 && a <= 1.0, "exhaustive.magnitudes must lie in [0, 1]");
  require(samples >= 1 && u_max > 0.0 && sigma >= 0.0, "exhaustive: invalid samples, u_max or sigma");
  require(t_calc <= replan_interval + 1e-12, "exhaustive.t_calc must not exceed exhaustive.replan_interval");
  const int tc = whole_cells(t_calc, grid.dt_c, "exhaustive.t_calc");
  whole_cells(replan_interval, grid.dt_c, "exhaustive.replan_interval");
  require(tc + depth * grid.obs_ratio <= grid.cells(), "exhaustive search horizon exceeds the planning horizon");
}

std::vector<Vec2> exhaustive_actions(const ExhaustiveConfig& cfg) {
  std::vector<Vec2> out;
  for (double a : cfg.magnitudes) {
    if (a == 0.0) {
      out.emplace_back(Vec2::Zero());
      continue;
    }
    for (int h = 0; h < cfg.headings; ++h) {
      const double theta = 2.0 * std::numbers::pi * h / cfg.headings;
      out.emplace_back(a * cfg.u_max * std::cos(theta), a * cfg.u_max * std::sin(theta));
    }
  }
  return out;
}

ExhaustiveTreeSearchController::ExhaustiveTreeSearchController(ExhaustiveConfig cfg, CostParams cost,
                                                               TimeGrid grid,
                                                               std::shared_ptr<const Predictor> predictor)
    : cfg_(std::move(cfg)), cost_(cost), grid_(grid), predictor_(std::move(predictor)) {
  require(predictor_ != nullptr, "exhaustive search needs a predictor");
  cfg_.validate(grid_);
  cost_.validate();
  actions_ = exhaustive_actions(cfg_);
}

int ExhaustiveTreeSearchController::replan_cells() const {
  return whole_cells(cfg_.replan_interval, grid_.dt_c, "exhaustive.replan_interval");
}

ControlSchedule ExhaustiveTreeSearchController::plan(const PlanningInput& input) {
  const int tc = whole_cells(cfg_.t_calc, grid_.dt_c, "exhaustive.t_calc");
  const auto length = static_cast<std::size_t>(tc + cfg_.depth * grid_.obs_ratio);
  ControlSchedule prefix = ControlSchedule::zeros(input.t0, grid_.dt_c, length, cfg_.u_max);
  if (previous_ && previous_->size() == length) {
    const long shift = std::lround((input.t0 - previous_->t0()) / grid_.dt_c);
    if (shift >= 0) {
      prefix = previous_->shifted(static_cast<std::size_t>(shift));
      prefix.set_t0(input.t0);
    }
  }
  const HumanTransitionSamples samples =
      predictor_->sample(input.humans, cfg_.samples, grid_.horizon_steps, input.seed);
  const PlanningContext ctx = make_context(input, samples, grid_, cost_);
  ControlSchedule best = search(ctx, prefix);
  previous_ = best;
  return best;
}

ControlSchedule ExhaustiveTreeSearchController::search(const PlanningContext& ctx, const ControlSchedule& prefix) {
  const int tc = whole_cells(cfg_.t_calc, grid_.dt_c, "exhaustive.t_calc");
  const int seg = grid_.obs_ratio;
  const int length = tc + cfg_.depth * seg;
  require(static_cast<int>(prefix.size()) == length, "exhaustive search: prefix has the wrong length");
  const std::size_t m = ctx.tracks.size();
  const double dt = grid_.dt_c;
  const double cut = cost_.cutoff_sq();
  const double inv = -0.5 / cost_.lambda;

  // Block index of every cell is shared by all samples.
  std::vector<int> block(static_cast<std::size_t>(length) + 1);
  for (int k = 0; k <= length; ++k) block[static_cast<std::size_t>(k)] = ctx.tracks.empty() ? 0 : ctx.tracks[0].block_of_cell(k);

  auto collision_at = [&](const Vec4& x, std::size_t j, int k) {
    double c = 0.0;
    if (cost_.alpha == 0.0) return c;
    for (const Vec2& h : ctx.tracks[j].block(block[static_cast<std::size_t>(k)])) {
      const double d2 = (x.head<2>() - h).squaredNorm();
      if (d2 > cut) continue;
      c += cost_.alpha * std::exp(d2 * inv);
    }
    return c;
  };

  struct Level {
    Vec4 x;
    double tracking = 0.0;
    std::vector<double> collision;
  };
  std::vector<Level> levels(static_cast<std::size_t>(cfg_.depth) + 1);
  for (auto& l : levels) l.collision.assign(m, 0.0);

  // Same accumulation order as tracking_cost / collision_total so a leaf's cost
  // equals the full-horizon evaluator bitwise.
  auto advance = [&](Level& out, const Level& in, int first, int count, const Vec2* constant) {
    out.x = in.x;
    out.tracking = in.tracking;
    out.collision = in.collision;
    for (int k = first; k < first + count; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const Vec2 u = constant != nullptr ? *constant : prefix.input(kk);
      const double energy = constant != nullptr ? u.squaredNorm() : prefix.energy(kk);
      const Vec4 e = out.x - ctx.reference[kk];
      out.tracking += dt * (0.5 * e.dot(cost_.Q * e) + 0.5 * cost_.control_weight * energy);
      for (std::size_t j = 0; j < m; ++j) out.collision[j] += dt * collision_at(out.x, j, k);
      out.x = euler_step_unchecked(out.x, u, dt);
    }
  };

  Level root;
  root.x = ctx.x0;
  root.collision.assign(m, 0.0);
  advance(levels[0], root, 0, tc, nullptr);

  std::vector<int> path(static_cast<std::size_t>(cfg_.depth), 0);
  std::vector<double> leaf_costs(m);
  last_count_ = 0;
  bool have_best = false;
  const auto na = static_cast<int>(actions_.size());

  // Iterative DFS over action indices.
  int d = 0;
  path[0] = -1;
  while (d >= 0) {
    if (++path[static_cast<std::size_t>(d)] >= na) {
      --d;
      continue;
    }
    const Vec2& a = actions_[static_cast<std::size_t>(path[static_cast<std::size_t>(d)])];
    advance(levels[static_cast<std::size_t>(d) + 1], levels[static_cast<std::size_t>(d)], tc + d * seg, seg, &a);
    if (d + 1 < cfg_.depth) {
      ++d;
      path[static_cast<std::size_t>(d)] = -1;
      continue;
    }
    const Level& leaf = levels[static_cast<std::size_t>(cfg_.depth)];
    const Vec4 e = leaf.x - ctx.reference[static_cast<std::size_t>(length)];
    const double tracking = leaf.tracking + 0.5 * cost_.beta * e.dot(cost_.Q * e);
    for (std::size_t j = 0; j < m; ++j) {
      leaf_costs[j] = tracking + (leaf.collision[j] + cost_.beta * collision_at(leaf.x, j, length));
    }
    const double risk = entropic_risk(leaf_costs, cfg_.sigma);
    ++last_count_;
    if (!have_best || risk < last_best_risk_) {
      have_best = true;
      last_best_risk_ = risk;
      last_best_ = path;
    }
  }

  ControlSchedule out = prefix;
  for (int level = 0; level < cfg_.depth; ++level) {
    const Vec2& a = actions_[static_cast<std::size_t>(last_best_[static_cast<std::size_t>(level)])];
    for (int k = tc + level * seg; k < tc + (level + 1) * seg; ++k) out.set_input(static_cast<std::size_t>(k), a);
  }
  return out;
}

std::unique_ptr<Controller> make_nominal_only_controller(RssacConfig cfg, const CostParams& cost,
                                                         const TimeGrid& grid,
                                                         std::shared_ptr<const Predictor> predictor) {
  cfg.perturb = false;
  return std::make_unique<RssacController>(std::move(cfg), cost, grid, std::move(predictor));
}

}  // namespace rssac
