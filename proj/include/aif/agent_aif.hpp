#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aif/adam.hpp"
#include "aif/agent.hpp"
#include "aif/distributions.hpp"
#include "aif/env.hpp"
#include "aif/mlp.hpp"
#include "aif/replay.hpp"

namespace aif {

struct AifConfig {
  double gamma_precision = 1.0;   // inverse temperature of the action prior
  double discount = 0.99;         // bootstrap discount
  bool entropy_enabled = true;
  bool epistemic_enabled = true;
  double epistemic_weight = 1.0;
  double posterior_std = 0.1;     // width of the observed-state posterior proxy
  double learning_rate = 0.001;
  int hidden_units = 100;
  int batch_size = 64;
  int target_sync_period = 50;    // learn steps between target refreshes

  void validate() const {
    if (!(gamma_precision > 0.0)) throw std::invalid_argument("gamma_precision must be > 0");
    if (!(discount > 0.0 && discount <= 1.0)) throw std::invalid_argument("discount must be in (0,1]");
    if (!(posterior_std > 0.0)) throw std::invalid_argument("posterior_std must be > 0");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (epistemic_weight < 0.0) throw std::invalid_argument("epistemic_weight must be >= 0");
  }
};

// Deep active inference agent: a Gaussian transition model, a softmax policy
// network, and an expected-free-energy value network with a frozen target
// copy, all trained one replay batch per environment step.
//
// The EFE network maps a state to one G value per action, so the bootstrap
// expectation over next actions and the Boltzmann action prior
// p(a|s) = softmax(-gamma * G(s, .)) are each a single forward pass.
class AifAgent final : public Agent {
 public:
  AifAgent(const EnvSpec& env, const AifConfig& cfg, Rng& init_rng)
      : obs_dim_(env.observation_dim),
        action_count_(env.action_count),
        cfg_(cfg) {
    cfg_.validate();
    const std::vector<int> hidden{cfg_.hidden_units, cfg_.hidden_units};
    transition_net_ = make_mlp(obs_dim_ + action_count_, hidden, 2 * obs_dim_, init_rng);
    policy_net_ = make_mlp(obs_dim_, hidden, action_count_, init_rng);
    efe_net_ = make_mlp(obs_dim_, hidden, action_count_, init_rng);
    target_.params = efe_net_;
    adam_transition_ = make_adam_state(transition_net_);
    adam_policy_ = make_adam_state(policy_net_);
    adam_efe_ = make_adam_state(efe_net_);
  }

  const char* name() const override { return "aif"; }

  int select_action(const Vec& state, Rng& rng, Vec* probs = nullptr) override {
    const Vec logits = mlp_forward(policy_net_, state);
    const SoftmaxResult sm = softmax_with_log(logits);
    if (probs) *probs = sm.probs;
    return rng.sample_categorical(sm.probs);
  }

  // Gaussian over the next state from (state, one-hot action).
  DiagGaussian transition_predict(const Vec& state, int action) const {
    const Vec out = mlp_forward(transition_net_, transition_input(state, action));
    return split_gaussian(out.data(), obs_dim_);
  }

  // Curiosity term of the bootstrap target: negated KL between a tight
  // Gaussian at the observed next state and the transition prediction, so a
  // poorly predicted transition lowers G and attracts the agent. Zero when
  // the ablation switch is off.
  double epistemic_bonus(const Vec& state, int action, const Vec& next_state) const {
    if (!cfg_.epistemic_enabled) return 0.0;
    const DiagGaussian posterior = isotropic_gaussian(next_state, cfg_.posterior_std);
    return -cfg_.epistemic_weight *
           diag_gaussian_kl(posterior, transition_predict(state, action));
  }

  // Bootstrapped EFE targets with a per-sample component breakdown.
  struct EfeTargetBatch {
    Vec ghat;
    Vec reward_term;     // -r
    Vec epistemic_term;  // the curiosity bonus
    Vec future_term;     // discounted expectation under the frozen target
  };

  // ghat_i = -r_i + epistemic_i
  //        + discount * [not terminal] * sum_a' pi(a'|s') * G_target(s', a').
  // Truncated-but-not-terminal transitions bootstrap normally.
  EfeTargetBatch efe_targets(const std::vector<Transition>& batch) const {
    if (batch.empty()) throw std::invalid_argument("efe_targets: empty batch");
    const int n = int(batch.size());

    Matrix next_states(n, obs_dim_);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < obs_dim_; ++d) next_states(i, d) = batch[i].next_state[d];
    }
    const Matrix policy_logits = mlp_forward(policy_net_, next_states);
    const Matrix g_target = mlp_forward(target_.params, next_states);

    EfeTargetBatch out;
    out.ghat.resize(n);
    out.reward_term.resize(n);
    out.epistemic_term.assign(n, 0.0);
    out.future_term.assign(n, 0.0);

    if (cfg_.epistemic_enabled) {
      Matrix inputs(n, obs_dim_ + action_count_);
      for (int i = 0; i < n; ++i) {
        fill_transition_input(batch[i].state, batch[i].action, inputs.row(i));
      }
      const Matrix pred = mlp_forward(transition_net_, inputs);
      for (int i = 0; i < n; ++i) {
        const DiagGaussian predicted = split_gaussian(pred.row(i), obs_dim_);
        const DiagGaussian posterior =
            isotropic_gaussian(batch[i].next_state, cfg_.posterior_std);
        out.epistemic_term[i] =
            -cfg_.epistemic_weight * diag_gaussian_kl(posterior, predicted);
      }
    }

    for (int i = 0; i < n; ++i) {
      out.reward_term[i] = -batch[i].reward;
      if (!batch[i].terminal) {
        Vec logits(policy_logits.row(i), policy_logits.row(i) + action_count_);
        const Vec probs = softmax_with_log(logits).probs;
        double expected = 0.0;
        for (int a = 0; a < action_count_; ++a) expected += probs[a] * g_target(i, a);
        out.future_term[i] = cfg_.discount * expected;
      }
      out.ghat[i] = out.reward_term[i] + out.epistemic_term[i] + out.future_term[i];
    }
    require_finite(out.ghat, "efe targets");
    return out;
  }

  // Mean squared error between G(s, a_taken) and the fixed target ghat; no
  // gradient flows through the targets.
  double efe_loss(const std::vector<Transition>& batch,
                  const EfeTargetBatch& targets, MlpGrads* grads = nullptr) const {
    if (batch.empty()) throw std::invalid_argument("efe_loss: empty batch");
    const int n = int(batch.size());
    ForwardCache cache;
    const Matrix g = mlp_forward(efe_net_, states_of(batch), grads ? &cache : nullptr);
    Matrix grad(n, action_count_);
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double diff = g(i, batch[i].action) - targets.ghat[i];
      loss += diff * diff;
      grad(i, batch[i].action) = 2.0 * diff / n;
    }
    loss /= n;
    require_finite(loss, "efe loss");
    if (grads) *grads = mlp_backward(efe_net_, cache, grad);
    return loss;
  }

  double efe_update(const std::vector<Transition>& batch, const EfeTargetBatch& targets) {
    MlpGrads grads;
    const double loss = efe_loss(batch, targets, &grads);
    adam_step(efe_net_, grads, adam_efe_, cfg_.learning_rate);
    return loss;
  }

  double efe_update(const std::vector<Transition>& batch) {
    return efe_update(batch, efe_targets(batch));
  }

  // Fits the policy q to the Boltzmann prior p = softmax(-gamma * G_live).
  // With the entropy term the loss is the full KL(q || p); with it ablated
  // only the cross-entropy -sum q log p remains. The action sum is computed
  // exactly, and no gradient reaches the EFE network.
  double policy_loss(const std::vector<Transition>& batch,
                     MlpGrads* grads = nullptr) const {
    if (batch.empty()) throw std::invalid_argument("policy_loss: empty batch");
    const int n = int(batch.size());
    const Matrix states = states_of(batch);
    ForwardCache cache;
    const Matrix logits = mlp_forward(policy_net_, states, grads ? &cache : nullptr);
    const Matrix g_live = mlp_forward(efe_net_, states);

    Matrix grad(n, action_count_);
    double loss = 0.0;
    Vec row_logits(action_count_), prior_logits(action_count_);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < action_count_; ++a) {
        row_logits[a] = logits(i, a);
        prior_logits[a] = -cfg_.gamma_precision * g_live(i, a);
      }
      const SoftmaxResult q = softmax_with_log(row_logits);
      const SoftmaxResult p = softmax_with_log(prior_logits);
      double sample_loss = 0.0;
      for (int a = 0; a < action_count_; ++a) {
        const double term = cfg_.entropy_enabled
                                ? q.log_probs[a] - p.log_probs[a]
                                : -p.log_probs[a];
        sample_loss += q.probs[a] * term;
      }
      for (int a = 0; a < action_count_; ++a) {
        const double term = cfg_.entropy_enabled
                                ? q.log_probs[a] - p.log_probs[a]
                                : -p.log_probs[a];
        grad(i, a) = q.probs[a] * (term - sample_loss) / n;
      }
      loss += sample_loss;
    }
    loss /= n;
    require_finite(loss, "policy loss");
    if (grads) *grads = mlp_backward(policy_net_, cache, grad);
    return loss;
  }

  double policy_update(const std::vector<Transition>& batch) {
    MlpGrads grads;
    const double loss = policy_loss(batch, &grads);
    adam_step(policy_net_, grads, adam_policy_, cfg_.learning_rate);
    return loss;
  }

  // Negative Gaussian log-likelihood of the observed next states under the
  // transition prediction.
  double transition_loss(const std::vector<Transition>& batch,
                         MlpGrads* grads = nullptr) const {
    if (batch.empty()) throw std::invalid_argument("transition_loss: empty batch");
    const int n = int(batch.size());
    Matrix inputs(n, obs_dim_ + action_count_);
    for (int i = 0; i < n; ++i) {
      fill_transition_input(batch[i].state, batch[i].action, inputs.row(i));
    }
    ForwardCache cache;
    const Matrix out = mlp_forward(transition_net_, inputs, grads ? &cache : nullptr);

    Matrix grad(n, 2 * obs_dim_);
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < obs_dim_; ++d) {
        const double mu = out(i, d);
        const double raw_lv = out(i, obs_dim_ + d);
        const double lv = std::clamp(raw_lv, kLogVarMin, kLogVarMax);
        const double inv_var = std::exp(-lv);
        const double diff = batch[i].next_state[d] - mu;
        loss += 0.5 * (kLog2Pi + lv + diff * diff * inv_var);
        grad(i, d) = -diff * inv_var / n;
        const bool clamped = raw_lv <= kLogVarMin || raw_lv >= kLogVarMax;
        grad(i, obs_dim_ + d) =
            clamped ? 0.0 : (0.5 - 0.5 * diff * diff * inv_var) / n;
      }
    }
    loss /= n;
    require_finite(loss, "transition loss");
    if (grads) *grads = mlp_backward(transition_net_, cache, grad);
    return loss;
  }

  double transition_update(const std::vector<Transition>& batch) {
    MlpGrads grads;
    const double loss = transition_loss(batch, &grads);
    adam_step(transition_net_, grads, adam_transition_, cfg_.learning_rate);
    return loss;
  }

  // One batch through all three updates, then a periodic target sync.
  StepTelemetry learn_step(ReplayBuffer& buffer, Rng& rng) override {
    StepTelemetry t;
    if (!buffer.ready(std::size_t(cfg_.batch_size))) return t;
    const auto batch = buffer.sample(std::size_t(cfg_.batch_size), rng);

    t.transition_loss = transition_update(batch);
    const EfeTargetBatch targets = efe_targets(batch);
    t.efe_loss = efe_update(batch, targets);
    t.policy_loss = policy_update(batch);
    double eps_sum = 0.0;
    for (double e : targets.epistemic_term) eps_sum += e;
    t.epistemic_bonus = eps_sum / double(batch.size());
    t.learned = true;

    ++learn_steps_;
    if (learn_steps_ % cfg_.target_sync_period == 0) {
      target_sync(target_, efe_net_, learn_steps_);
    }
    return t;
  }

  const AifConfig& config() const { return cfg_; }
  int observation_dim() const { return obs_dim_; }
  int action_count() const { return action_count_; }
  std::int64_t learn_steps() const { return learn_steps_; }
  void set_learn_steps(std::int64_t s) { learn_steps_ = s; }

  MlpParams& transition_net() { return transition_net_; }
  MlpParams& policy_net() { return policy_net_; }
  MlpParams& efe_net() { return efe_net_; }
  const MlpParams& transition_net() const { return transition_net_; }
  const MlpParams& policy_net() const { return policy_net_; }
  const MlpParams& efe_net() const { return efe_net_; }
  TargetSnapshot& target() { return target_; }
  const TargetSnapshot& target() const { return target_; }
  AdamState& adam_transition() { return adam_transition_; }
  AdamState& adam_policy() { return adam_policy_; }
  AdamState& adam_efe() { return adam_efe_; }
  const AdamState& adam_transition() const { return adam_transition_; }
  const AdamState& adam_policy() const { return adam_policy_; }
  const AdamState& adam_efe() const { return adam_efe_; }

 private:
  Vec transition_input(const Vec& state, int action) const {
    Vec in(obs_dim_ + action_count_, 0.0);
    fill_transition_input(state, action, in.data());
    return in;
  }

  void fill_transition_input(const Vec& state, int action, double* dst) const {
    if (int(state.size()) != obs_dim_) {
      throw std::invalid_argument("transition input: state dim mismatch");
    }
    if (action < 0 || action >= action_count_) {
      throw std::invalid_argument("transition input: action out of range");
    }
    for (int d = 0; d < obs_dim_; ++d) dst[d] = state[d];
    for (int a = 0; a < action_count_; ++a) dst[obs_dim_ + a] = 0.0;
    dst[obs_dim_ + action] = 1.0;
  }

  static DiagGaussian split_gaussian(const double* out, int obs_dim) {
    Vec mean(out, out + obs_dim);
    Vec log_var(out + obs_dim, out + 2 * obs_dim);
    return DiagGaussian(std::move(mean), std::move(log_var));
  }

  Matrix states_of(const std::vector<Transition>& batch) const {
    Matrix m(int(batch.size()), obs_dim_);
    for (int i = 0; i < int(batch.size()); ++i) {
      for (int d = 0; d < obs_dim_; ++d) m(i, d) = batch[i].state[d];
    }
    return m;
  }

  int obs_dim_;
  int action_count_;
  AifConfig cfg_;
  MlpParams transition_net_;
  MlpParams policy_net_;
  MlpParams efe_net_;
  TargetSnapshot target_;
  AdamState adam_transition_;
  AdamState adam_policy_;
  AdamState adam_efe_;
  std::int64_t learn_steps_ = 0;
};

}  // namespace aif
