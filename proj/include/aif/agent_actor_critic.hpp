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

struct AcConfig {
  double discount = 0.99;
  double learning_rate = 0.001;
  int hidden_units = 100;
  int batch_size = 64;
  int target_sync_period = 50;
};

// Actor-critic baseline. The critic is a per-action Q network trained
// exactly like the Q-learning agent; the actor minimizes
// -log pi(a|s) * A(s,a) with A = Q(s,a) - sum_a' pi(a'|s) Q(s,a') and the
// critic treated as constant. Both networks have two hidden layers.
class AcAgent final : public Agent {
 public:
  AcAgent(const EnvSpec& env, const AcConfig& cfg, Rng& init_rng)
      : obs_dim_(env.observation_dim), action_count_(env.action_count), cfg_(cfg) {
    const std::vector<int> hidden{cfg_.hidden_units, cfg_.hidden_units};
    policy_net_ = make_mlp(obs_dim_, hidden, action_count_, init_rng);
    critic_net_ = make_mlp(obs_dim_, hidden, action_count_, init_rng);
    target_.params = critic_net_;
    adam_policy_ = make_adam_state(policy_net_);
    adam_critic_ = make_adam_state(critic_net_);
  }

  const char* name() const override { return "actorcritic"; }

  int select_action(const Vec& state, Rng& rng, Vec* probs = nullptr) override {
    const Vec logits = mlp_forward(policy_net_, state);
    const SoftmaxResult sm = softmax_with_log(logits);
    if (probs) *probs = sm.probs;
    return rng.sample_categorical(sm.probs);
  }

  Vec critic_targets(const std::vector<Transition>& batch) const {
    const int n = int(batch.size());
    const Matrix q_next = mlp_forward(target_.params, states_of(batch, true));
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

  double critic_loss(const std::vector<Transition>& batch, const Vec& targets,
                     MlpGrads* grads = nullptr) const {
    const int n = int(batch.size());
    ForwardCache cache;
    const Matrix q =
        mlp_forward(critic_net_, states_of(batch, false), grads ? &cache : nullptr);
    Matrix grad(n, action_count_);
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double diff = q(i, batch[i].action) - targets[i];
      loss += diff * diff;
      grad(i, batch[i].action) = 2.0 * diff / n;
    }
    loss /= n;
    require_finite(loss, "critic loss");
    if (grads) *grads = mlp_backward(critic_net_, cache, grad);
    return loss;
  }

  double critic_update(const std::vector<Transition>& batch) {
    MlpGrads grads;
    const double loss = critic_loss(batch, critic_targets(batch), &grads);
    adam_step(critic_net_, grads, adam_critic_, cfg_.learning_rate);
    return loss;
  }

  // A(s,a) = Q(s,a) - sum_a' pi(a'|s) Q(s,a'), evaluated with the current
  // networks. Treated as constant in the actor loss.
  Vec advantages(const std::vector<Transition>& batch) const {
    const int n = int(batch.size());
    const Matrix states = states_of(batch, false);
    const Matrix logits = mlp_forward(policy_net_, states);
    const Matrix q = mlp_forward(critic_net_, states);
    Vec adv(n);
    Vec row_logits(action_count_);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < action_count_; ++a) row_logits[a] = logits(i, a);
      const SoftmaxResult pi = softmax_with_log(row_logits);
      double baseline = 0.0;
      for (int a = 0; a < action_count_; ++a) baseline += pi.probs[a] * q(i, a);
      adv[i] = q(i, batch[i].action) - baseline;
    }
    return adv;
  }

  double actor_loss(const std::vector<Transition>& batch, const Vec& advantages,
                    MlpGrads* grads = nullptr) const {
    const int n = int(batch.size());
    ForwardCache cache;
    const Matrix logits =
        mlp_forward(policy_net_, states_of(batch, false), grads ? &cache : nullptr);
    Matrix grad(n, action_count_);
    double loss = 0.0;
    Vec row_logits(action_count_);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < action_count_; ++a) row_logits[a] = logits(i, a);
      const SoftmaxResult pi = softmax_with_log(row_logits);
      const int taken = batch[i].action;
      loss += -pi.log_probs[taken] * advantages[i];
      for (int a = 0; a < action_count_; ++a) {
        const double d_neg_logp = pi.probs[a] - (a == taken ? 1.0 : 0.0);
        grad(i, a) = d_neg_logp * advantages[i] / n;
      }
    }
    loss /= n;
    require_finite(loss, "actor loss");
    if (grads) *grads = mlp_backward(policy_net_, cache, grad);
    return loss;
  }

  double actor_update(const std::vector<Transition>& batch) {
    MlpGrads grads;
    const double loss = actor_loss(batch, advantages(batch), &grads);
    adam_step(policy_net_, grads, adam_policy_, cfg_.learning_rate);
    return loss;
  }

  StepTelemetry learn_step(ReplayBuffer& buffer, Rng& rng) override {
    StepTelemetry t;
    if (!buffer.ready(std::size_t(cfg_.batch_size))) return t;
    const auto batch = buffer.sample(std::size_t(cfg_.batch_size), rng);
    t.efe_loss = critic_update(batch);
    t.policy_loss = actor_update(batch);
    t.learned = true;
    ++learn_steps_;
    if (learn_steps_ % cfg_.target_sync_period == 0) {
      target_sync(target_, critic_net_, learn_steps_);
    }
    return t;
  }

  const AcConfig& config() const { return cfg_; }
  std::int64_t learn_steps() const { return learn_steps_; }
  void set_learn_steps(std::int64_t s) { learn_steps_ = s; }
  MlpParams& policy_net() { return policy_net_; }
  MlpParams& critic_net() { return critic_net_; }
  const MlpParams& policy_net() const { return policy_net_; }
  const MlpParams& critic_net() const { return critic_net_; }
  TargetSnapshot& target() { return target_; }
  const TargetSnapshot& target() const { return target_; }
  AdamState& adam_policy() { return adam_policy_; }
  AdamState& adam_critic() { return adam_critic_; }
  const AdamState& adam_policy() const { return adam_policy_; }
  const AdamState& adam_critic() const { return adam_critic_; }

 private:
  Matrix states_of(const std::vector<Transition>& batch, bool next) const {
    Matrix m(int(batch.size()), obs_dim_);
    for (int i = 0; i < int(batch.size()); ++i) {
      const Vec& s = next ? batch[i].next_state : batch[i].state;
      for (int d = 0; d < obs_dim_; ++d) m(i, d) = s[d];
    }
    return m;
  }

  int obs_dim_;
  int action_count_;
  AcConfig cfg_;
  MlpParams policy_net_;
  MlpParams critic_net_;
  TargetSnapshot target_;
  AdamState adam_policy_;
  AdamState adam_critic_;
  std::int64_t learn_steps_ = 0;
};

}  // namespace aif
