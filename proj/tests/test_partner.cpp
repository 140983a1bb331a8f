#include <catch2/catch.hpp>

#include <vector>

#include "waltz/partner.hpp"

using namespace waltz;

namespace {

std::vector<Pose> hands_at(const Vec3& left, const Vec3& right) {
  std::vector<Pose> poses(2);
  poses[0].position = left;
  poses[1].position = right;
  return poses;
}

}  // namespace

TEST_CASE("coincident hands at rest measure zero wrench") {
  PartnerModel model;
  const auto robot = hands_at(Vec3(0.4, 0.3, 0.2), Vec3(0.4, -0.3, 0.2));
  const PartnerState state = init_partner(model, robot);
  for (std::size_t h = 0; h < 2; ++h) {
    const Wrench w = measured_wrench(model, state, h, robot[h], Twist{});
    CHECK(w.force.norm() == 0.0);
    CHECK(w.moment.norm() == 0.0);
  }
}

TEST_CASE("a 1 cm offset through a 200 N/m spring reads 2 N with no moment") {
  PartnerModel model;
  model.stiffness = 200.0;
  model.damping = 0.0;
  const auto robot = hands_at(Vec3(0.4, 0.3, 0.2), Vec3(0.4, -0.3, 0.2));
  const PartnerState state = init_partner(model, robot);

  Pose displaced = robot[0];
  displaced.position += Vec3(0.01, 0, 0);  // robot hand moved toward +x
  const Wrench w = measured_wrench(model, state, 0, displaced, Twist{});
  CHECK(w.force.x() == Approx(-2.0).margin(1e-12));
  CHECK(w.force.tail<2>().norm() == 0.0);
  CHECK(w.moment.norm() == 0.0);
}

TEST_CASE("absent partner measures zero for any state") {
  PartnerModel model;
  model.mode = PartnerMode::Absent;
  const auto robot = hands_at(Vec3(0.4, 0.3, 0.2), Vec3(0.4, -0.3, 0.2));
  PartnerState state = init_partner(model, robot);
  Pose far = robot[0];
  far.position += Vec3(5, 5, 5);
  state = step_partner(model, std::move(state), robot, 0.005, 0.0);
  CHECK(measured_wrench(model, state, 0, far, Twist{}).vector().norm() == 0.0);
}

TEST_CASE("a lag-free compliant follower tracks the robot hand perfectly") {
  PartnerModel model;
  model.lag = 0.0;
  auto robot = hands_at(Vec3(0.4, 0.3, 0.2), Vec3(0.4, -0.3, 0.2));
  PartnerState state = init_partner(model, robot);
  robot[0].position += Vec3(0.05, -0.02, 0.01);
  state = step_partner(model, std::move(state), robot, 0.005, 0.0);
  CHECK((state.hands[0].position - robot[0].position).norm() < 1e-12);
  // spring term vanishes; only damping from the partner's own motion remains
  const Wrench w = measured_wrench(model, state, 0, robot[0], Twist{});
  CHECK(model.stiffness * (state.hands[0].position - robot[0].position).norm() < 1e-9);
  (void)w;
}

TEST_CASE("a resistive partner reaches the spring steady state") {
  PartnerModel model;
  model.mode = PartnerMode::Resistive;
  model.damping = 0.0;
  auto robot = hands_at(Vec3(0.4, 0.3, 0.2), Vec3(0.4, -0.3, 0.2));
  PartnerState state = init_partner(model, robot);

  robot[0].position += Vec3(0.05, 0, 0);  // robot hand shifted 5 cm
  for (int k = 0; k < 2000; ++k)
    state = step_partner(model, std::move(state), robot, 0.005, k * 0.005);
  const Wrench w = measured_wrench(model, state, 0, robot[0], Twist{});
  CHECK(w.force.norm() == Approx(model.stiffness * 0.05).margin(1e-9));
  CHECK(w.force.x() < 0.0);  // pulls the robot hand back toward the anchor
}

TEST_CASE("push-away mode behaves compliantly until the onset, then shoves") {
  PartnerModel model;
  model.mode = PartnerMode::PushAway;
  model.push_onset = 1.0;
  const auto robot = hands_at(Vec3(0.4, 0.3, 0.2), Vec3(0.4, -0.3, 0.2));
  PartnerState state = init_partner(model, robot);

  const double dt = 0.005;
  double t = 0.0;
  for (; t < 1.0; t += dt) state = step_partner(model, std::move(state), robot, dt, t);
  CHECK((state.hands[0].position - robot[0].position).norm() < 1e-6);

  for (int k = 0; k < 800; ++k, t += dt)
    state = step_partner(model, std::move(state), robot, dt, t);
  // virtual hand settled at the push target, well past the stop threshold
  CHECK((state.hands[0].position - robot[0].position).norm() == Approx(0.3).margin(1e-3));
  const Wrench w = measured_wrench(model, state, 0, robot[0], Twist{});
  CHECK(w.force.norm() > 5.0);
}

TEST_CASE("identical seeds give identical wrench streams") {
  PartnerModel model;
  model.noise_amplitude = 0.5;
  model.seed = 1234;
  const auto robot = hands_at(Vec3(0.4, 0.3, 0.2), Vec3(0.4, -0.3, 0.2));

  const auto run = [&] {
    PartnerState state = init_partner(model, robot);
    std::vector<double> samples;
    auto moving = robot;
    for (int k = 0; k < 200; ++k) {
      moving[0].position.x() = 0.4 + 0.01 * std::sin(0.1 * k);
      state = step_partner(model, std::move(state), moving, 0.005, k * 0.005);
      const Wrench w = measured_wrench(model, state, 0, moving[0], Twist{});
      samples.push_back(w.force.x());
      samples.push_back(w.force.y());
    }
    return samples;
  };
  CHECK(run() == run());
}

TEST_CASE("compliant wrench stays within the spring-damper bound") {
  PartnerModel model;
  const auto rest = hands_at(Vec3(0.4, 0.3, 0.2), Vec3(0.4, -0.3, 0.2));
  PartnerState state = init_partner(model, rest);

  const double dt = 0.005;
  const double max_speed = 0.5;   // robot hand speed bound used below
  const double initial_offset = 0.0;
  auto robot = rest;
  for (int k = 0; k < 1000; ++k) {
    const double t = k * dt;
    robot[0].position =
        rest[0].position + Vec3(0.2 * std::sin(2.0 * t), 0.1 * std::cos(2.5 * t), 0);
    Twist vel;
    vel.linear = Vec3(0.4 * std::cos(2.0 * t), -0.25 * std::sin(2.5 * t), 0);
    state = step_partner(model, std::move(state), robot, dt, t);
    const Wrench w = measured_wrench(model, state, 0, robot[0], vel);
    // lagging tracker can never be farther than the peak excursion, and its
    // own velocity is bounded by the target motion it filters
    const double bound = model.stiffness * (initial_offset + 0.23) +
                         model.damping * (2.0 * max_speed) + 1e-9;
    CHECK(w.force.norm() <= bound);
  }
}

TEST_CASE("wrench decays to zero when the robot stops and the partner converges") {
  PartnerModel model;
  auto robot = hands_at(Vec3(0.4, 0.3, 0.2), Vec3(0.4, -0.3, 0.2));
  PartnerState state = init_partner(model, robot);
  robot[0].position += Vec3(0.1, 0, 0);
  for (int k = 0; k < 1000; ++k)
    state = step_partner(model, std::move(state), robot, 0.005, k * 0.005);
  const Wrench w = measured_wrench(model, state, 0, robot[0], Twist{});
  CHECK(w.force.norm() < 1e-3);
}

TEST_CASE("partner validation") {
  PartnerModel model;
  model.stiffness = -1.0;
  CHECK_THROWS_AS(model.validate(), ConfigError);
  model = PartnerModel{};
  model.noise_amplitude = -0.1;
  CHECK_THROWS_AS(model.validate(), ConfigError);
  model = PartnerModel{};
  CHECK_THROWS_AS(partner_mode_from_string("bogus"), ConfigError);
}
