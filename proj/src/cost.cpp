#include "rssac/cost.hpp"

#include <algorithm>
#include <cmath>

namespace rssac {

void CostParams::validate() const {
  require(Q.allFinite() && Q.isApprox(Q.transpose(), 0.0), "cost.Q must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat4> eig(Q);
  require(eig.eigenvalues().minCoeff() >= -1e-12, "cost.Q must be positive semidefinite");
  require(control_weight > 0.0, "cost.r must be positive (R = r I positive definite)");
  require(alpha >= 0.0, "cost.alpha must be nonnegative");
  require(lambda > 0.0, "cost.lambda must be positive");
  require(beta >= 0.0, "cost.beta must be nonnegative");
}

Vec4 ReferenceTrajectory::at(double t) const {
  const Vec2 delta = goal - start;
  const double length = delta.norm();
  Vec4 r = Vec4::Zero();
  if (length == 0.0) {
    r.head<2>() = goal;
    return r;
  }
  const Vec2 dir = delta / length;
  const double s = std::clamp(speed * (t - t_start), 0.0, length);
  r.head<2>() = start + s * dir;
  if (t >= t_start && s < length) r.tail<2>() = speed * dir;
  return r;
}

std::vector<Vec4> ReferenceTrajectory::sample(double t0, double dt, int nodes) const {
  std::vector<Vec4> out;
  out.reserve(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) out.push_back(at(t0 + dt * k));
  return out;
}

double collision_cost(const Vec2& robot_pos, std::span<const Vec2> humans, const CostParams& p) {
  const double cut = p.cutoff_sq();
  const double inv = -0.5 / p.lambda;
  double c = 0.0;
  for (const Vec2& h : humans) {
    const double d2 = (robot_pos - h).squaredNorm();
    if (d2 > cut) continue;
    c += p.alpha * std::exp(d2 * inv);
  }
  return c;
}

Vec2 collision_cost_gradient(const Vec2& robot_pos, std::span<const Vec2> humans, const CostParams& p) {
  const double cut = p.cutoff_sq();
  const double inv = -0.5 / p.lambda;
  Vec2 g = Vec2::Zero();
  for (const Vec2& h : humans) {
    const Vec2 d = robot_pos - h;
    const double d2 = d.squaredNorm();
    if (d2 > cut) continue;
    g -= (p.alpha / p.lambda) * std::exp(d2 * inv) * d;
  }
  return g;
}

double running_cost(const Vec4& x, std::span<const Vec2> humans, const Vec2& u, const Vec4& ref,
                    const CostParams& p) {
  const Vec4 e = x - ref;
  return 0.5 * e.dot(p.Q * e) + 0.5 * p.control_weight * u.squaredNorm() +
         collision_cost(x.head<2>(), humans, p);
}

double terminal_cost(const Vec4& x, std::span<const Vec2> humans, const Vec4& ref, const CostParams& p) {
  const Vec4 e = x - ref;
  return 0.5 * p.beta * e.dot(p.Q * e) + p.beta * collision_cost(x.head<2>(), humans, p);
}

Vec4 running_cost_state_gradient(const Vec4& x, std::span<const Vec2> humans, const Vec4& ref,
                                 const CostParams& p) {
  Vec4 g = p.Q * (x - ref);
  g.head<2>() += collision_cost_gradient(x.head<2>(), humans, p);
  return g;
}

Vec4 terminal_cost_state_gradient(const Vec4& x, std::span<const Vec2> humans, const Vec4& ref,
                                  const CostParams& p) {
  return p.beta * running_cost_state_gradient(x, humans, ref, p);
}

double tracking_cost(std::span<const Vec4> robot, const ControlSchedule& u, std::span<const Vec4> ref,
                     const CostParams& p) {
  require(!robot.empty(), "empty robot trajectory");
  const std::size_t cells = robot.size() - 1;
  require(u.size() >= cells && ref.size() >= robot.size(), "cost: grid mismatch between trajectory, control and reference");
  const double dt = u.dt();
  double j = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    const Vec4 e = robot[k] - ref[k];
    j += dt * (0.5 * e.dot(p.Q * e) + 0.5 * p.control_weight * u.energy(k));
  }
  const Vec4 e = robot[cells] - ref[cells];
  return j + 0.5 * p.beta * e.dot(p.Q * e);
}

double collision_total(std::span<const Vec4> robot, const HumanTrack& humans, double dt, const CostParams& p) {
  require(!robot.empty(), "empty robot trajectory");
  if (p.alpha == 0.0 || humans.humans() == 0) return 0.0;
  const int cells = static_cast<int>(robot.size()) - 1;
  const double cut = p.cutoff_sq();
  const double reach = std::sqrt(cut);
  const double inv = -0.5 / p.lambda;
  std::vector<Vec2> near;
  near.reserve(static_cast<std::size_t>(humans.humans()));
  double j = 0.0;
  double terminal = 0.0;
  for (int b = 0; b < humans.blocks(); ++b) {
    const int first = humans.block_start(b);
    if (first > cells) break;
    const int last = b + 1 < humans.blocks() ? std::min(humans.block_start(b + 1) - 1, cells) : cells;
    // Bounding box of the robot over the block; humans farther than the cutoff
    // from the box contribute nothing to any cell of the block.
    Vec2 lo = robot[first].head<2>();
    Vec2 hi = lo;
    for (int k = first + 1; k <= last; ++k) {
      lo = lo.cwiseMin(robot[k].head<2>());
      hi = hi.cwiseMax(robot[k].head<2>());
    }
    near.clear();
    for (const Vec2& h : humans.block(b)) {
      const Vec2 gap = (lo - h).cwiseMax(h - hi).cwiseMax(Vec2::Zero());
      if (gap.norm() <= reach) near.push_back(h);
    }
    if (near.empty()) continue;
    for (int k = first; k <= last; ++k) {
      const Vec2 pos = robot[k].head<2>();
      double c = 0.0;
      for (const Vec2& h : near) {
        const double d2 = (pos - h).squaredNorm();
        if (d2 > cut) continue;
        c += p.alpha * std::exp(d2 * inv);
      }
      if (k < cells) {
        j += dt * c;
      } else {
        terminal = p.beta * c;
      }
    }
  }
  return j + terminal;
}

double total_cost(const JointTrajectory& traj, const ControlSchedule& u, std::span<const Vec4> ref,
                  const CostParams& p) {
  require(traj.humans.humans() == static_cast<int>(traj.human_ids.size()) || traj.human_ids.empty(),
          "cost: malformed trajectory");
  return tracking_cost(traj.robot, u, ref, p) + collision_total(traj.robot, traj.humans, u.dt(), p);
}

}  // namespace rssac
