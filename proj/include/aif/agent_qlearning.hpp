#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "aif/adam.hpp"
#include "aif/agent.hpp"
#include "aif/distributions.hpp"
#include "aif/env.hpp"
#include "aif/mlp.hpp"
#include "aif/replay.hpp"

namespace aif {

struct QConfig {
  double discount = 0.99;
  double boltzmann_beta = 1.0;  // exploration temperature, same role as gamma
  double learning_rate = 0.001;
  int hidden_units = 100;
  int batch_size = 64;
  int target_sync_period = 50;
};

// Deep Q-learning with Boltzmann exploration, replay buffer and target
// network. The value net has a single hidden layer.
class QAgent final : public Agent {
 public:
  QAgent(const EnvSpec& env, const QConfig& cfg, Rng& init_rng)
      : obs_dim_(env.observation_dim), action_count_(env.action_count), cfg_(cfg) {
    q_net_ = make_mlp(obs_dim_, {cfg_.hidden_units}, action_count_, init_rng);
    target_.params = q_net_;
    adam_ = make_adam_state(q_net_);
  }

  const char* name() const override { return "qlearning"; }

  // Sample from softmax(beta * Q(s, .)).
  int select_action(const Vec& state, Rng& rng, Vec* probs = nullptr) override {
    Vec logits = mlp_forward(q_net_, state);
    for (double& v : logits) v *= cfg_.boltzmann_beta;
    const SoftmaxResult sm = softmax_with_log(logits);
    if (probs) *probs = sm.probs;
    return rng.sample_categorical(sm.probs);
  }

  // Bootstrapped targets r + discount * [not terminal] * max_a' Q_target.
  Vec q_targets(const std::vector<Transition>& batch) const {
    const int n = int(batch.size());
    Matrix next_states(n, obs_dim_);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < obs_dim_; ++d) next_states(i, d) = batch[i].next_state[d];
    }
    const Matrix q_next = mlp_forward(target_.params, next_states);
    Vec targets(n);
    for (int i = 0; i < n; ++i) {
      targets[i] = batch[i].reward;
      if (!batch[i].terminal) {
        const double* row = q_next.row(i);
        targets[i] += cfg_.discount * *std::max_element(row, row + action_count_);
      }
    }
    return targets;
  }

  // MSE between Q(s,a) and the fixed targets.
  double q_loss(const std::vector<Transition>& batch, const Vec& targets,
                MlpGrads* grads = nullptr) const {
    const int n = int(batch.size());
    Matrix states(n, obs_dim_);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < obs_dim_; ++d) states(i, d) = batch[i].state[d];
    }
    ForwardCache cache;
    const Matrix q = mlp_forward(q_net_, states, grads ? &cache : nullptr);

    Matrix grad(n, action_count_);
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double diff = q(i, batch[i].action) - targets[i];
      loss += diff * diff;
      grad(i, batch[i].action) = 2.0 * diff / n;
    }
    loss /= n;
    require_finite(loss, "q loss");
    if (grads) *grads = mlp_backward(q_net_, cache, grad);
    return loss;
  }

  double q_update(const std::vector<Transition>& batch) {
    MlpGrads grads;
    const double loss = q_loss(batch, q_targets(batch), &grads);
    adam_step(q_net_, grads, adam_, cfg_.learning_rate);
    return loss;
  }

  StepTelemetry learn_step(ReplayBuffer& buffer, Rng& rng) override {
    StepTelemetry t;
    if (!buffer.ready(std::size_t(cfg_.batch_size))) return t;
    const auto batch = buffer.sample(std::size_t(cfg_.batch_size), rng);
    t.efe_loss = q_update(batch);
    t.learned = true;
    ++learn_steps_;
    if (learn_steps_ % cfg_.target_sync_period == 0) {
      target_sync(target_, q_net_, learn_steps_);
    }
    return t;
  }

  const QConfig& config() const { return cfg_; }
  std::int64_t learn_steps() const { return learn_steps_; }
  void set_learn_steps(std::int64_t s) { learn_steps_ = s; }
  MlpParams& q_net() { return q_net_; }
  const MlpParams& q_net() const { return q_net_; }
  TargetSnapshot& target() { return target_; }
  const TargetSnapshot& target() const { return target_; }
  AdamState& adam() { return adam_; }
  const AdamState& adam() const { return adam_; }

 private:
  int obs_dim_;
  int action_count_;
  QConfig cfg_;
  MlpParams q_net_;
  TargetSnapshot target_;
  AdamState adam_;
  std::int64_t learn_steps_ = 0;
};

}  // namespace aif
