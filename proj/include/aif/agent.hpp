#pragma once

#include "aif/numeric.hpp"
#include "aif/replay.hpp"
#include "aif/rng.hpp"

namespace aif {

// Per-step loss telemetry. `learned` is false while the buffer is warming
// up. Baselines report their value-network loss in `efe_loss` and, for the
// actor-critic, the actor loss in `policy_loss`.
struct StepTelemetry {
  bool learned = false;
  double transition_loss = 0.0;
  double efe_loss = 0.0;
  double policy_loss = 0.0;
  double epistemic_bonus = 0.0;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual const char* name() const = 0;
  // Samples an action; fills `probs` with the action distribution if given.
  virtual int select_action(const Vec& state, Rng& rng, Vec* probs = nullptr) = 0;
  virtual StepTelemetry learn_step(ReplayBuffer& buffer, Rng& rng) = 0;
};

}  // namespace aif
