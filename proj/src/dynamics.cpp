#include "rssac/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace rssac {
namespace {

bool finite(const Vec2& v) { return std::isfinite(v(0)) && std::isfinite(v(1)); }

// Norm bound with a little slack for inputs produced by rescaling onto the disk.
bool within(const Vec2& u, double u_max) { return u.norm() <= u_max * (1.0 + 1e-12); }

}  // namespace

TimeGrid TimeGrid::make(double dt_c, double dt_o, int horizon_steps) {
  require(dt_c > 0.0 && dt_o > 0.0, "time steps must be positive");
  require(horizon_steps >= 1, "horizon must contain at least one observation step");
  const double ratio = dt_o / dt_c;
  const double rounded = std::round(ratio);
  require(rounded >= 1.0 && std::abs(ratio - rounded) < 1e-9 * rounded,
          "observation interval dt_o must be an integer multiple of the control step dt_c");
  return TimeGrid{dt_c, static_cast<int>(rounded), horizon_steps};
}

ControlSchedule::ControlSchedule(double t0, double dt, std::vector<Vec2> inputs, double u_max)
    : t0_(t0), dt_(dt), u_max_(u_max), inputs_(std::move(inputs)) {
  require(dt > 0.0, "control step must be positive");
  require(u_max >= 0.0, "u_max must be nonnegative");
  energy_.reserve(inputs_.size());
  for (std::size_t k = 0; k < inputs_.size(); ++k) {
    require(finite(inputs_[k]), "control input " + std::to_string(k) + " is not finite");
    require(within(inputs_[k], u_max), "control input " + std::to_string(k) + " exceeds u_max");
    energy_.push_back(inputs_[k].squaredNorm());
  }
}

ControlSchedule ControlSchedule::zeros(double t0, double dt, std::size_t cells, double u_max) {
  return ControlSchedule(t0, dt, std::vector<Vec2>(cells, Vec2::Zero()), u_max);
}

void ControlSchedule::set_input(std::size_t k, const Vec2& u) {
  require(k < size(), "control cell out of range");
  require(finite(u) && within(u, u_max_), "control input violates the norm bound");
  inputs_[k] = u;
  energy_[k] = u.squaredNorm();
}

void ControlSchedule::blend_cell(std::size_t k, const Vec2& v, double fraction) {
  require(k < size(), "control cell out of range");
  require(fraction > 0.0 && fraction <= 1.0, "blend fraction must lie in (0, 1]");
  if (fraction == 1.0) {
    set_input(k, v);
    return;
  }
  require(finite(v) && within(v, u_max_), "control input violates the norm bound");
  inputs_[k] = inputs_[k] + fraction * (v - inputs_[k]);
  energy_[k] = fraction * v.squaredNorm() + (1.0 - fraction) * energy_[k];
}

ControlSchedule ControlSchedule::shifted(std::size_t cells) const {
  ControlSchedule out = *this;
  const std::size_t n = size();
  const std::size_t drop = std::min(cells, n);
  std::rotate(out.inputs_.begin(), out.inputs_.begin() + static_cast<std::ptrdiff_t>(drop), out.inputs_.end());
  std::rotate(out.energy_.begin(), out.energy_.begin() + static_cast<std::ptrdiff_t>(drop), out.energy_.end());
  for (std::size_t k = n - drop; k < n; ++k) {
    out.inputs_[k].setZero();
    out.energy_[k] = 0.0;
  }
  out.t0_ = t0_ + dt_ * static_cast<double>(cells);
  return out;
}

bool ControlSchedule::operator==(const ControlSchedule& other) const {
  return t0_ == other.t0_ && dt_ == other.dt_ && u_max_ == other.u_max_ && inputs_ == other.inputs_ &&
         energy_ == other.energy_;
}

Vec4 drift(const Vec4& x) {
  Vec4 f;
  f << x(2), x(3), 0.0, 0.0;
  return f;
}

Mat42 input_matrix(const Vec4&) {
  Mat42 h = Mat42::Zero();
  h(2, 0) = 1.0;
  h(3, 1) = 1.0;
  return h;
}

Mat4 drift_jacobian(const Vec4&) {
  Mat4 a = Mat4::Zero();
  a(0, 2) = 1.0;
  a(1, 3) = 1.0;
  return a;
}

Vec4 euler_step(const Vec4& x, const Vec2& u, double dt) {
  require(x.allFinite() && finite(u) && std::isfinite(dt), "euler_step: non-finite input");
  require(dt > 0.0, "euler_step: dt must be positive");
  return x + dt * (drift(x) + input_matrix(x) * u);
}

JointState apply_human_transitions(const JointState& s, std::span<const Vec2> displacements, double t_k) {
  require(displacements.size() == s.humans.size(), "human transition count does not match the scene (" +
                                                       std::to_string(displacements.size()) + " vs " +
                                                       std::to_string(s.humans.size()) + ")");
  JointState out = s;
  out.time = t_k;
  for (std::size_t i = 0; i < displacements.size(); ++i) out.humans[i].position += displacements[i];
  return out;
}

std::vector<Vec4> robot_rollout(const Vec4& x0, const ControlSchedule& u) {
  require(x0.allFinite(), "initial robot state is not finite");
  std::vector<Vec4> xs(u.size() + 1);
  xs[0] = x0;
  for (std::size_t k = 0; k < u.size(); ++k) xs[k + 1] = euler_step_unchecked(xs[k], u.input(k), u.dt());
  return xs;
}

HumanTrack::HumanTrack(std::span<const Vec2> initial, std::span<const Vec2> displacements, int horizon_steps,
                       const TimeGrid& grid, int first_jump_cell)
    : n_humans_(static_cast<int>(initial.size())) {
  require(displacements.size() == initial.size() * static_cast<std::size_t>(horizon_steps),
          "displacement array must be N x T");
  require(first_jump_cell >= 1, "first jump must come after the initial state");
  const int n = n_humans_;
  block_start_.push_back(0);
  positions_.assign(initial.begin(), initial.end());
  for (int k = 0; k < horizon_steps; ++k) {
    const int cell = first_jump_cell + k * grid.obs_ratio;
    if (cell > grid.cells()) break;
    block_start_.push_back(cell);
    const std::size_t prev = positions_.size() - static_cast<std::size_t>(n);
    for (int i = 0; i < n; ++i) {
      positions_.push_back(positions_[prev + static_cast<std::size_t>(i)] +
                           displacements[static_cast<std::size_t>(i) * horizon_steps + k]);
    }
  }
}

int HumanTrack::block_of_cell(int k) const {
  auto it = std::upper_bound(block_start_.begin(), block_start_.end(), k);
  return static_cast<int>(it - block_start_.begin()) - 1;
}

JointState JointTrajectory::state_at(int k) const {
  JointState s;
  s.time = t0 + dt * k;
  s.robot = RobotState::from(robot.at(static_cast<std::size_t>(k)));
  auto pos = humans.at_cell(k);
  for (std::size_t i = 0; i < pos.size(); ++i) s.humans.push_back({human_ids.at(i), pos[i]});
  return s;
}

JointTrajectory rollout(const JointState& s0, const ControlSchedule& u, std::span<const Vec2> displacements,
                        const TimeGrid& grid, int first_jump_cell) {
  require(static_cast<int>(u.size()) >= grid.cells(), "control schedule does not cover the horizon");
  std::vector<Vec2> initial;
  std::vector<int> ids;
  for (const auto& h : s0.humans) {
    require(h.position.allFinite(), "human position is not finite");
    initial.push_back(h.position);
    ids.push_back(h.id);
  }
  JointTrajectory traj;
  traj.t0 = s0.time;
  traj.dt = u.dt();
  traj.robot = robot_rollout(s0.robot.stacked(), u);
  traj.robot.resize(static_cast<std::size_t>(grid.cells()) + 1);
  traj.humans = HumanTrack(initial, displacements, grid.horizon_steps, grid, first_jump_cell);
  traj.human_ids = std::move(ids);
  return traj;
}

}  // namespace rssac
