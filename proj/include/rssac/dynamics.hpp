#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rssac/types.hpp"

namespace rssac {

/// Double-integrator robot: position and velocity in the plane, stacked as (p, v).
struct RobotState {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();

  Vec4 stacked() const {
    Vec4 x;
    x << position, velocity;
    return x;
  }
  static RobotState from(const Vec4& x) { return {x.head<2>(), x.tail<2>()}; }
};

struct HumanState {
  int id = 0;
  Vec2 position = Vec2::Zero();
};

struct JointState {
  double time = 0.0;
  RobotState robot;
  std::vector<HumanState> humans;
};

/// Control integration step, human observation interval and planning horizon.
/// The observation interval is always a whole number of integration steps.
struct TimeGrid {
  double dt_c = 0.02;
  int obs_ratio = 20;
  int horizon_steps = 12;

  static TimeGrid make(double dt_c, double dt_o, int horizon_steps);

  double dt_o() const { return dt_c * obs_ratio; }
  int cells() const { return obs_ratio * horizon_steps; }
  double horizon() const { return dt_c * cells(); }
};

/// Piecewise-constant control on a uniform grid starting at t0. Cell k covers
/// [t0 + k dt, t0 + (k+1) dt). Besides the (time-averaged) input, each cell
/// carries the time average of |u|^2 so that a cell split between two inputs
/// keeps its exact control energy.
class ControlSchedule {
 public:
  ControlSchedule() = default;
  ControlSchedule(double t0, double dt, std::vector<Vec2> inputs, double u_max);

  static ControlSchedule zeros(double t0, double dt, std::size_t cells, double u_max);

  std::size_t size() const { return inputs_.size(); }
  double t0() const { return t0_; }
  double dt() const { return dt_; }
  double u_max() const { return u_max_; }
  double end_time() const { return t0_ + dt_ * static_cast<double>(size()); }

  const Vec2& input(std::size_t k) const { return inputs_[k]; }
  double energy(std::size_t k) const { return energy_[k]; }
  const std::vector<Vec2>& inputs() const { return inputs_; }

  void set_input(std::size_t k, const Vec2& u);
  /// Replaces a fraction of cell k (0 < fraction <= 1) by the constant v.
  void blend_cell(std::size_t k, const Vec2& v, double fraction);

  /// Drops the first `cells` cells, pads the tail with zero input and moves t0.
  ControlSchedule shifted(std::size_t cells) const;
  void set_t0(double t0) { t0_ = t0; }

  bool operator==(const ControlSchedule& other) const;

 private:
  double t0_ = 0.0;
  double dt_ = 0.02;
  double u_max_ = 0.0;
  std::vector<Vec2> inputs_;
  std::vector<double> energy_;
};

Vec4 drift(const Vec4& x);
Mat42 input_matrix(const Vec4& x);
/// Jacobian of the drift; the input matrix is constant so d(Hu)/dx = 0.
Mat4 drift_jacobian(const Vec4& x);

/// Explicit Euler step of the control-affine robot dynamics.
Vec4 euler_step(const Vec4& x, const Vec2& u, double dt);

inline Vec4 euler_step_unchecked(const Vec4& x, const Vec2& u, double dt) {
  Vec4 out;
  out << x(0) + dt * x(2), x(1) + dt * x(3), x(2) + dt * u(0), x(3) + dt * u(1);
  return out;
}

/// Jumps every human by its displacement and moves the clock to t_k.
JointState apply_human_transitions(const JointState& s, std::span<const Vec2> displacements, double t_k);

/// Robot states on the control grid: size() == schedule.size() + 1.
std::vector<Vec4> robot_rollout(const Vec4& x0, const ControlSchedule& u);

/// Human positions along one sampled future. Positions are held constant between
/// jumps; jump k of the sample happens at cell first_jump_cell + k * obs_ratio and
/// the state at that cell already includes it. Jumps past the horizon are dropped.
class HumanTrack {
 public:
  HumanTrack() = default;
  /// `displacements` is N x T row-major (human-major).
  HumanTrack(std::span<const Vec2> initial, std::span<const Vec2> displacements, int horizon_steps,
             const TimeGrid& grid, int first_jump_cell);

  int humans() const { return n_humans_; }
  int blocks() const { return static_cast<int>(block_start_.size()); }
  int block_of_cell(int k) const;
  /// First cell of block b; block b holds for cells [block_start(b), block_start(b+1)).
  int block_start(int b) const { return block_start_[b]; }
  std::span<const Vec2> block(int b) const {
    return {positions_.data() + static_cast<std::size_t>(b) * n_humans_, static_cast<std::size_t>(n_humans_)};
  }
  std::span<const Vec2> at_cell(int k) const { return block(block_of_cell(k)); }

 private:
  int n_humans_ = 0;
  std::vector<int> block_start_;
  std::vector<Vec2> positions_;
};

struct JointTrajectory {
  double t0 = 0.0;
  double dt = 0.02;
  std::vector<Vec4> robot;
  HumanTrack humans;
  std::vector<int> human_ids;

  int cells() const { return static_cast<int>(robot.size()) - 1; }
  JointState state_at(int k) const;
};

JointTrajectory rollout(const JointState& s0, const ControlSchedule& u, std::span<const Vec2> displacements,
                        const TimeGrid& grid, int first_jump_cell);

}  // namespace rssac
