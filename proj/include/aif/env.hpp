#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "aif/numeric.hpp"
#include "aif/rng.hpp"

namespace aif {

struct EnvSpec {
  int observation_dim = 0;
  int action_count = 0;
  int max_steps = 0;
  std::string name;
};

struct StepResult {
  Vec observation;
  double reward = 0.0;
  bool terminal = false;   // reached a genuine end state
  bool truncated = false;  // step limit hit; bootstrapping treats as ongoing
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual Vec reset(Rng& rng) = 0;
  virtual StepResult step(int action) = 0;
};

}  // namespace aif
