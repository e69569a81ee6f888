#include <doctest.h>

#include "helpers.hpp"

using namespace rssac;

TEST_CASE("drift of the double integrator") {
  CHECK(drift(Vec4(0, 0, 1, 0)) == Vec4(1, 0, 0, 0));
  CHECK(drift(Vec4(3, -2, 0, 0)) == Vec4::Zero());
  CHECK(drift(Vec4(1, 1, -2, 0.5)) == Vec4(-2, 0.5, 0, 0));
}

TEST_CASE("input matrix is constant") {
  Mat42 expected;
  expected << 0, 0, 0, 0, 1, 0, 0, 1;
  CHECK(input_matrix(Vec4(1, 2, 3, 4)) == expected);
  CHECK(input_matrix(Vec4::Zero()) * Vec2(1, 0) == Vec4(0, 0, 1, 0));
  CHECK(input_matrix(Vec4::Zero()) * Vec2::Zero() == Vec4::Zero());
}

TEST_CASE("explicit Euler step") {
  CHECK(euler_step(Vec4(0, 0, 1, 0), Vec2::Zero(), 0.02) == Vec4(0.02, 0, 1, 0));
  CHECK(euler_step(Vec4(0, 0, 1, 0), Vec2(1, 0), 0.02) == Vec4(0.02, 0, 1.02, 0));
  Vec4 x(1.5, -2.0, 0, 0);
  for (int k = 0; k < 240; ++k) x = euler_step(x, Vec2::Zero(), 0.02);
  CHECK(x == Vec4(1.5, -2.0, 0, 0));

  CHECK_THROWS_AS(euler_step(Vec4(NAN, 0, 0, 0), Vec2::Zero(), 0.02), Error);
  CHECK_THROWS_AS(euler_step(Vec4::Zero(), Vec2(INFINITY, 0), 0.02), Error);
  CHECK_THROWS_AS(euler_step(Vec4::Zero(), Vec2::Zero(), -0.1), Error);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vec4 x0 = testing::random_vec4(rng, 3.0);
    const Vec2 u = testing::random_in_disk(rng, 5.0);
    CHECK(euler_step(x0, u, 0.02) == euler_step_unchecked(x0, u, 0.02));
  }
}

TEST_CASE("human jump transitions") {
  JointState s;
  s.humans = {{1, Vec2(1, 1)}};
  const std::vector<Vec2> zero = {Vec2::Zero()};
  CHECK(apply_human_transitions(s, zero, 0.4).humans[0].position == Vec2(1, 1));
  const std::vector<Vec2> y = {Vec2(0.4, -0.2)};
  const JointState moved = apply_human_transitions(s, y, 0.4);
  CHECK(moved.humans[0].position.isApprox(Vec2(1.4, 0.8)));
  CHECK(moved.time == 0.4);

  s.humans = {{1, Vec2(0, 0)}, {2, Vec2(5, 5)}};
  s.robot.position = Vec2(7, 7);
  const std::vector<Vec2> two = {Vec2(1, 0), Vec2(0, 1)};
  const JointState both = apply_human_transitions(s, two, 0.4);
  CHECK(both.humans[0].position == Vec2(1, 0));
  CHECK(both.humans[1].position == Vec2(5, 6));
  CHECK(both.robot.position == Vec2(7, 7));
  CHECK_THROWS_AS(apply_human_transitions(s, y, 0.4), Error);
}

TEST_CASE("time grid") {
  const TimeGrid g = TimeGrid::make(0.02, 0.4, 12);
  CHECK(g.obs_ratio == 20);
  CHECK(g.cells() == 240);
  CHECK(g.horizon() == doctest::Approx(4.8).epsilon(1e-12));
  CHECK(std::abs(g.horizon() - 12 * g.dt_o()) < g.dt_c);
  CHECK_THROWS_AS(TimeGrid::make(0.03, 0.4, 12), Error);
  CHECK_THROWS_AS(TimeGrid::make(0.02, 0.4, 0), Error);
  CHECK_THROWS_AS(TimeGrid::make(0.0, 0.4, 12), Error);
}

TEST_CASE("control schedule saturation is enforced at construction") {
  CHECK_THROWS_AS(ControlSchedule(0.0, 0.02, {Vec2(5.1, 0)}, 5.0), Error);
  CHECK_NOTHROW(ControlSchedule(0.0, 0.02, {Vec2(3, 4)}, 5.0));
  ControlSchedule u = ControlSchedule::zeros(0.0, 0.02, 10, 5.0);
  CHECK_THROWS_AS(u.set_input(3, Vec2(4, 4)), Error);
  CHECK_THROWS_AS(u.set_input(10, Vec2(0, 0)), Error);
}

TEST_CASE("blended cell keeps the exact control energy") {
  ControlSchedule u(0.0, 0.02, {Vec2(1, 0)}, 5.0);
  u.blend_cell(0, Vec2(0, 3), 0.25);
  CHECK(u.input(0).isApprox(Vec2(0.75, 0.75)));
  CHECK(u.energy(0) == doctest::Approx(0.25 * 9 + 0.75 * 1));
  CHECK(u.energy(0) >= u.input(0).squaredNorm());
}

TEST_CASE("shifting drops leading cells and pads with zeros") {
  ControlSchedule u(1.0, 0.02, {Vec2(1, 0), Vec2(2, 0), Vec2(3, 0)}, 5.0);
  const ControlSchedule s = u.shifted(2);
  CHECK(s.size() == 3);
  CHECK(s.input(0) == Vec2(3, 0));
  CHECK(s.input(1) == Vec2::Zero());
  CHECK(s.energy(2) == 0.0);
  CHECK(s.t0() == doctest::Approx(1.04));
}

TEST_CASE("rollout on the control grid") {
  const TimeGrid g;
  JointState s0;
  s0.robot = {Vec2(1, 2), Vec2::Zero()};
  s0.humans = {{7, Vec2(3, 3)}};
  const ControlSchedule u = ControlSchedule::zeros(0.0, g.dt_c, static_cast<std::size_t>(g.cells()), 5.0);
  std::vector<Vec2> zero(12, Vec2::Zero());

  SUBCASE("static scene") {
    const JointTrajectory t = rollout(s0, u, zero, g, 20);
    CHECK(t.robot.size() == 241);
    for (int k = 0; k <= 240; ++k) {
      CHECK(t.robot[static_cast<std::size_t>(k)] == s0.robot.stacked());
      CHECK(t.state_at(k).humans[0].position == Vec2(3, 3));
    }
  }

  SUBCASE("constant human displacement gives 1 m/s") {
    std::vector<Vec2> y(12, Vec2(0.4, 0));
    const JointTrajectory t = rollout(s0, u, y, g, 20);
    const Vec2 end = t.state_at(240).humans[0].position;
    CHECK((end - Vec2(3, 3)).x() / 4.8 == doctest::Approx(1.0));
    // Piecewise constant between jumps, post-jump value at the jump cell.
    for (int k = 0; k < 240; ++k) {
      const Vec2 p = t.state_at(k).humans[0].position;
      const int jumps = k / 20;
      CHECK(p.isApprox(Vec2(3 + 0.4 * jumps, 3)));
    }
  }

  SUBCASE("jumps are aligned to the next observation") {
    std::vector<Vec2> y(12, Vec2(0, 1));
    const JointTrajectory t = rollout(s0, u, y, g, 7);
    CHECK(t.state_at(6).humans[0].position == Vec2(3, 3));
    CHECK(t.state_at(7).humans[0].position == Vec2(3, 4));
    CHECK(t.state_at(26).humans[0].position == Vec2(3, 4));
    CHECK(t.state_at(27).humans[0].position == Vec2(3, 5));
  }

  SUBCASE("determinism") {
    std::mt19937_64 rng(5);
    const ControlSchedule r = testing::random_schedule(rng, 0.0, g, 5.0, 5.0);
    std::vector<Vec2> y(12);
    for (auto& v : y) v = testing::random_in_disk(rng, 0.5);
    const JointTrajectory a = rollout(s0, r, y, g, 20);
    const JointTrajectory b = rollout(s0, r, y, g, 20);
    CHECK(a.robot == b.robot);
    for (int k = 0; k <= 240; ++k) CHECK(a.state_at(k).humans[0].position == b.state_at(k).humans[0].position);
  }

  SUBCASE("dimension mismatch") {
    std::vector<Vec2> short_y(11, Vec2::Zero());
    CHECK_THROWS_AS(rollout(s0, u, short_y, g, 20), Error);
  }
}
