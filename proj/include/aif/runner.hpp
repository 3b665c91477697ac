#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "aif/agent.hpp"
#include "aif/agent_actor_critic.hpp"
#include "aif/agent_aif.hpp"
#include "aif/agent_qlearning.hpp"
#include "aif/config.hpp"
#include "aif/distributions.hpp"
#include "aif/envs.hpp"
#include "aif/replay.hpp"

namespace aif {

// Per-episode telemetry. Loss fields are means over the episode's learn
// steps and NaN while the buffer is still warming up.
struct EpisodeRecord {
  int trial = 0;
  int episode = 0;
  double total_reward = 0.0;
  int length = 0;
  double mean_transition_loss = std::nan("");
  double mean_efe_loss = std::nan("");
  double mean_policy_loss = std::nan("");
  double mean_policy_entropy = std::nan("");
  double mean_epistemic = std::nan("");
  int learn_steps = 0;
};

// Independent, deterministically derived per-trial streams.
struct TrialRngs {
  Rng env;
  Rng init;
  Rng action;
  Rng replay;
};

inline TrialRngs make_trial_rngs(std::uint64_t base_seed, int trial_index) {
  const Rng root(base_seed + std::uint64_t(trial_index));
  return {root.derive(1), root.derive(2), root.derive(3), root.derive(4)};
}

inline std::unique_ptr<Agent> make_agent(const ExperimentConfig& c,
                                         const EnvSpec& env, Rng& init_rng) {
  if (c.agent == "aif") {
    AifConfig a;
    a.gamma_precision = c.gamma_precision;
    a.discount = c.discount;
    a.entropy_enabled = c.entropy_enabled;
    a.epistemic_enabled = c.epistemic_enabled;
    a.epistemic_weight = c.epistemic_weight;
    a.posterior_std = c.posterior_std;
    a.learning_rate = c.learning_rate;
    a.hidden_units = c.hidden_units;
    a.batch_size = c.batch_size;
    a.target_sync_period = c.target_sync_period;
    return std::make_unique<AifAgent>(env, a, init_rng);
  }
  if (c.agent == "qlearning") {
    QConfig q;
    q.discount = c.discount;
    q.boltzmann_beta = c.boltzmann_beta;
    q.learning_rate = c.learning_rate;
    q.hidden_units = c.hidden_units;
    q.batch_size = c.batch_size;
    q.target_sync_period = c.target_sync_period;
    return std::make_unique<QAgent>(env, q, init_rng);
  }
  if (c.agent == "actorcritic") {
    AcConfig a;
    a.discount = c.discount;
    a.learning_rate = c.learning_rate;
    a.hidden_units = c.hidden_units;
    a.batch_size = c.batch_size;
    a.target_sync_period = c.target_sync_period;
    return std::make_unique<AcAgent>(env, a, init_rng);
  }
  throw std::invalid_argument("unknown agent: " + c.agent);
}

// One action-perception loop: select, step, store, learn, until the episode
// terminates or hits the step limit.
inline EpisodeRecord run_episode(Agent& agent, Environment& env,
                                 ReplayBuffer& buffer, TrialRngs& rngs) {
  EpisodeRecord rec;
  Vec obs = env.reset(rngs.env);

  double entropy_sum = 0.0;
  double t_loss = 0.0, e_loss = 0.0, p_loss = 0.0, eps_sum = 0.0;
  Vec probs;
  while (true) {
    const int action = agent.select_action(obs, rngs.action, &probs);
    entropy_sum += categorical_entropy(probs);
    const StepResult sr = env.step(action);

    buffer.push(Transition{obs, action, sr.reward, sr.observation, sr.terminal,
                           sr.truncated});
    const StepTelemetry t = agent.learn_step(buffer, rngs.replay);
    if (t.learned) {
      ++rec.learn_steps;
      t_loss += t.transition_loss;
      e_loss += t.efe_loss;
      p_loss += t.policy_loss;
      eps_sum += t.epistemic_bonus;
    }

    rec.total_reward += sr.reward;
    ++rec.length;
    obs = sr.observation;
    if (sr.terminal || sr.truncated) break;
  }

  rec.mean_policy_entropy = entropy_sum / rec.length;
  if (rec.learn_steps > 0) {
    rec.mean_transition_loss = t_loss / rec.learn_steps;
    rec.mean_efe_loss = e_loss / rec.learn_steps;
    rec.mean_policy_loss = p_loss / rec.learn_steps;
    rec.mean_epistemic = eps_sum / rec.learn_steps;
  }
  return rec;
}

struct TrialResult {
  int trial = 0;
  std::vector<EpisodeRecord> records;
  bool failed = false;
  std::string error;
};

// Callback invoked after every episode (streaming records to disk, progress
// logging). May be empty.
using EpisodeSink = std::function<void(const EpisodeRecord&)>;

// Fresh agent, environment and buffer seeded from base_seed + trial_index.
// Aborts are captured with context; records up to the failure are kept.
inline TrialResult run_trial(
    const ExperimentConfig& config, int trial_index,
    const EpisodeSink& sink = {},
    const std::function<void(const Agent&)>& on_complete = {}) {
  TrialResult result;
  result.trial = trial_index;
  result.records.reserve(config.episodes);
  try {
    TrialRngs rngs = make_trial_rngs(config.seed, trial_index);
    auto env = make_env(config.env, config.angle_limit_deg);
    auto agent = make_agent(config, env->spec(), rngs.init);
    ReplayBuffer buffer(std::size_t(config.buffer_capacity));

    for (int ep = 0; ep < config.episodes; ++ep) {
      EpisodeRecord rec = run_episode(*agent, *env, buffer, rngs);
      rec.trial = trial_index;
      rec.episode = ep;
      if (sink) sink(rec);
      result.records.push_back(rec);
    }
    if (on_complete) on_complete(*agent);
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = std::string(e.what()) + " (trial " +
                   std::to_string(trial_index) + ", episode " +
                   std::to_string(int(result.records.size())) + ")";
  }
  return result;
}

}  // namespace aif
