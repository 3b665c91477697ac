#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aif/env.hpp"

namespace aif {

// Cart-pole balancing with the standard benchmark physics: Euler integration
// at 20 ms, +-10 N pushes, terminate when the pole leans past the angle limit
// or the cart leaves +-2.4 m. Reward is +1 for every step taken.
class CartPole final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kTotalMass = kCartMass + kPoleMass;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kPoleMassLength = kPoleMass * kHalfLength;
  static constexpr double kForceMag = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kPositionLimit = 2.4;
  static constexpr int kMaxSteps = 500;

  explicit CartPole(double angle_limit_deg = 12.0)
      : angle_limit_(angle_limit_deg * std::numbers::pi / 180.0) {
    spec_ = {4, 2, kMaxSteps, "cartpole"};
  }

  const EnvSpec& spec() const override { return spec_; }

  // State is (x, x_dot, theta, theta_dot); one Euler step under `force`.
  static std::array<double, 4> dynamics(const std::array<double, 4>& s,
                                        double force) {
    const auto [x, x_dot, theta, theta_dot] = s;
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    const double temp =
        (force + kPoleMassLength * theta_dot * theta_dot * sin_t) / kTotalMass;
    const double theta_acc =
        (kGravity * sin_t - cos_t * temp) /
        (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / kTotalMass));
    const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;
    return {x + kTau * x_dot, x_dot + kTau * x_acc, theta + kTau * theta_dot,
            theta_dot + kTau * theta_acc};
  }

  Vec reset(Rng& rng) override {
    for (double& v : state_) v = rng.next_uniform(-0.05, 0.05);
    steps_ = 0;
    done_ = false;
    return observation();
  }

  StepResult step(int action) override {
    if (action < 0 || action >= spec_.action_count) {
      throw std::invalid_argument("cartpole: action out of range");
    }
    if (done_) throw std::logic_error("cartpole: step called on finished episode");

    state_ = dynamics(state_, action == 1 ? kForceMag : -kForceMag);
    ++steps_;

    StepResult r;
    r.observation = observation();
    r.reward = 1.0;
    r.terminal = std::abs(state_[2]) > angle_limit_ ||
                 std::abs(state_[0]) > kPositionLimit;
    r.truncated = steps_ >= kMaxSteps;
    done_ = r.terminal || r.truncated;
    return r;
  }

 private:
  Vec observation() const {
    return {state_[0], state_[1], state_[2], state_[3]};
  }

  EnvSpec spec_;
  double angle_limit_;
  std::array<double, 4> state_{};
  int steps_ = 0;
  bool done_ = false;
};

}  // namespace aif
