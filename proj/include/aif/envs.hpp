#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "aif/acrobot.hpp"
#include "aif/cartpole.hpp"
#include "aif/env.hpp"

namespace aif {

inline std::unique_ptr<Environment> make_env(
    const std::string& name, double cartpole_angle_limit_deg = 12.0) {
  if (name == "cartpole") {
    return std::make_unique<CartPole>(cartpole_angle_limit_deg);
  }
  if (name == "acrobot") return std::make_unique<Acrobot>();
  throw std::invalid_argument("unknown environment: " + name);
}

}  // namespace aif
