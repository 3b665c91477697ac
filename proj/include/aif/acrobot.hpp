#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aif/env.hpp"

namespace aif {

// Two-link underactuated pendulum, torque on the second joint, standard
// benchmark parameters (unit masses and lengths). One env step is a single
// RK4 step of 0.2 s. Reward is -1 per step until the free end swings above
// the height threshold. Internal state is (theta1, theta2, dtheta1, dtheta2);
// observations expose (cos t1, sin t1, cos t2, sin t2, dtheta1, dtheta2).
class Acrobot final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kLinkMass = 1.0;
  static constexpr double kLinkLength = 1.0;
  static constexpr double kLinkCom = 0.5;   // distance to center of mass
  static constexpr double kLinkMoi = 1.0;   // moment of inertia
  static constexpr double kDt = 0.2;
  static constexpr double kMaxVel1 = 4.0 * std::numbers::pi;
  static constexpr double kMaxVel2 = 9.0 * std::numbers::pi;
  static constexpr int kMaxSteps = 500;

  Acrobot() { spec_ = {6, 3, kMaxSteps, "acrobot"}; }

  const EnvSpec& spec() const override { return spec_; }

  static std::array<double, 4> derivatives(const std::array<double, 4>& s,
                                           double torque) {
    constexpr double m = kLinkMass, l1 = kLinkLength, lc = kLinkCom,
                     moi = kLinkMoi, g = kGravity;
    const auto [t1, t2, dt1, dt2] = s;
    const double d1 =
        m * lc * lc + m * (l1 * l1 + lc * lc + 2.0 * l1 * lc * std::cos(t2)) +
        2.0 * moi;
    const double d2 = m * (lc * lc + l1 * lc * std::cos(t2)) + moi;
    // cos(x - pi/2) written as sin(x): identical dynamics, and the hanging
    // rest state is an exact fixed point.
    const double phi2 = m * lc * g * std::sin(t1 + t2);
    const double phi1 = -m * l1 * lc * dt2 * dt2 * std::sin(t2) -
                        2.0 * m * l1 * lc * dt2 * dt1 * std::sin(t2) +
                        (m * lc + m * l1) * g * std::sin(t1) + phi2;
    const double ddt2 =
        (torque + (d2 / d1) * phi1 - m * l1 * lc * dt1 * dt1 * std::sin(t2) -
         phi2) /
        (m * lc * lc + moi - d2 * d2 / d1);
    const double ddt1 = -(d2 * ddt2 + phi1) / d1;
    return {dt1, dt2, ddt1, ddt2};
  }

  // One RK4 step with angle wrapping and velocity clamping.
  static std::array<double, 4> dynamics(const std::array<double, 4>& s,
                                        double torque) {
    const auto k1 = derivatives(s, torque);
    const auto k2 = derivatives(axpy(s, k1, kDt / 2.0), torque);
    const auto k3 = derivatives(axpy(s, k2, kDt / 2.0), torque);
    const auto k4 = derivatives(axpy(s, k3, kDt), torque);
    std::array<double, 4> out;
    for (int i = 0; i < 4; ++i) {
      out[i] = s[i] + kDt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out[0] = wrap_pi(out[0]);
    out[1] = wrap_pi(out[1]);
    out[2] = std::clamp(out[2], -kMaxVel1, kMaxVel1);
    out[3] = std::clamp(out[3], -kMaxVel2, kMaxVel2);
    return out;
  }

  Vec reset(Rng& rng) override {
    for (double& v : state_) v = rng.next_uniform(-0.1, 0.1);
    steps_ = 0;
    done_ = false;
    return observation();
  }

  StepResult step(int action) override {
    if (action < 0 || action >= spec_.action_count) {
      throw std::invalid_argument("acrobot: action out of range");
    }
    if (done_) throw std::logic_error("acrobot: step called on finished episode");

    state_ = dynamics(state_, double(action - 1));
    ++steps_;

    StepResult r;
    r.observation = observation();
    r.terminal =
        -std::cos(state_[0]) - std::cos(state_[1] + state_[0]) > 1.0;
    r.reward = r.terminal ? 0.0 : -1.0;
    r.truncated = steps_ >= kMaxSteps;
    done_ = r.terminal || r.truncated;
    return r;
  }

 private:
  static std::array<double, 4> axpy(const std::array<double, 4>& s,
                                    const std::array<double, 4>& d, double h) {
    return {s[0] + h * d[0], s[1] + h * d[1], s[2] + h * d[2], s[3] + h * d[3]};
  }

  static double wrap_pi(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a + std::numbers::pi, two_pi);
    if (a < 0.0) a += two_pi;
    return a - std::numbers::pi;
  }

  Vec observation() const {
    return {std::cos(state_[0]), std::sin(state_[0]), std::cos(state_[1]),
            std::sin(state_[1]), state_[2], state_[3]};
  }

  EnvSpec spec_;
  std::array<double, 4> state_{};
  int steps_ = 0;
  bool done_ = false;
};

}  // namespace aif
