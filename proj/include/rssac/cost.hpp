#pragma once

#include <span>
#include <vector>

#include "rssac/dynamics.hpp"

namespace rssac {

/// Weights of the tracking + collision cost. The control weight is the scalar r
/// of R = r I; the closed-form perturbation relies on R being a scaled identity.
struct CostParams {
  Mat4 Q = Eigen::Vector4d(0.5, 0.5, 0.0, 0.0).asDiagonal();
  double control_weight = 0.2;
  double alpha = 100.0;
  double lambda = 0.2;
  double beta = 0.1;

  Mat2 R() const { return control_weight * Mat2::Identity(); }
  /// Squared distance beyond which a human's Gaussian term (< alpha e^-50) is dropped.
  double cutoff_sq() const { return 2.0 * lambda * 50.0; }
  void validate() const;
};

/// Straight line from start to goal traversed at constant speed from t_start,
/// then parked at the goal.
struct ReferenceTrajectory {
  Vec2 start = Vec2::Zero();
  Vec2 goal = Vec2::Zero();
  double speed = 1.0;
  double t_start = 0.0;

  Vec4 at(double t) const;
  /// Reference at t0 + k dt for k in [0, nodes).
  std::vector<Vec4> sample(double t0, double dt, int nodes) const;
};

double collision_cost(const Vec2& robot_pos, std::span<const Vec2> humans, const CostParams& p);
Vec2 collision_cost_gradient(const Vec2& robot_pos, std::span<const Vec2> humans, const CostParams& p);

double running_cost(const Vec4& x, std::span<const Vec2> humans, const Vec2& u, const Vec4& ref,
                    const CostParams& p);
double terminal_cost(const Vec4& x, std::span<const Vec2> humans, const Vec4& ref, const CostParams& p);

Vec4 running_cost_state_gradient(const Vec4& x, std::span<const Vec2> humans, const Vec4& ref,
                                 const CostParams& p);
Vec4 terminal_cost_state_gradient(const Vec4& x, std::span<const Vec2> humans, const Vec4& ref,
                                  const CostParams& p);

// J splits into a part that only depends on the robot trajectory (tracking and
// control effort) and the collision part that depends on the human sample. Both
// use the left-endpoint rectangle rule on the control grid plus the terminal term.

double tracking_cost(std::span<const Vec4> robot, const ControlSchedule& u, std::span<const Vec4> ref,
                     const CostParams& p);
double collision_total(std::span<const Vec4> robot, const HumanTrack& humans, double dt, const CostParams& p);

/// Cost functional J of a joint trajectory; `ref` holds the reference at every grid node.
double total_cost(const JointTrajectory& traj, const ControlSchedule& u, std::span<const Vec4> ref,
                  const CostParams& p);

}  // namespace rssac
