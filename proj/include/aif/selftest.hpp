#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "aif/agent_actor_critic.hpp"
#include "aif/agent_aif.hpp"
#include "aif/agent_qlearning.hpp"
#include "aif/cartpole.hpp"
#include "aif/distributions.hpp"
#include "aif/gradient_check.hpp"
#include "aif/replay.hpp"
#include "aif/rng.hpp"

// Fast built-in oracles: finite-difference gradient checks for every loss in
// the framework plus the closed-form sanity checks. Shared by the `check`
// CLI subcommand and the test suites.
namespace aif::selftest {

inline std::vector<Transition> random_batch(int obs_dim, int action_count,
                                            int n, Rng& rng) {
  std::vector<Transition> batch(n);
  for (auto& t : batch) {
    t.state.resize(obs_dim);
    t.next_state.resize(obs_dim);
    for (double& v : t.state) v = rng.next_gaussian();
    for (double& v : t.next_state) v = rng.next_gaussian();
    t.action = rng.next_index(action_count);
    t.reward = rng.next_uniform(-1.0, 1.0);
    t.terminal = rng.next_double() < 0.2;
    t.truncated = false;
  }
  return batch;
}

inline EnvSpec toy_spec(int obs_dim = 4, int action_count = 2) {
  return EnvSpec{obs_dim, action_count, 500, "fixture"};
}

// Each helper freezes whatever the implementation treats as constant
// (bootstrap targets, Boltzmann priors, advantages) and perturbs only the
// network the loss trains.

inline double grad_err_transition(const AifAgent& agent,
                                  const std::vector<Transition>& batch,
                                  int probes, Rng& rng) {
  AifAgent tmp = agent;
  LossGradFn fn = [&](const MlpParams& p, MlpGrads* g) {
    tmp.transition_net() = p;
    return tmp.transition_loss(batch, g);
  };
  return gradient_check(fn, agent.transition_net(), probes, rng);
}

inline double grad_err_efe(const AifAgent& agent,
                           const std::vector<Transition>& batch, int probes,
                           Rng& rng) {
  const auto targets = agent.efe_targets(batch);
  AifAgent tmp = agent;
  LossGradFn fn = [&](const MlpParams& p, MlpGrads* g) {
    tmp.efe_net() = p;
    return tmp.efe_loss(batch, targets, g);
  };
  return gradient_check(fn, agent.efe_net(), probes, rng);
}

inline double grad_err_policy(const AifAgent& agent,
                              const std::vector<Transition>& batch, int probes,
                              Rng& rng) {
  AifAgent tmp = agent;
  LossGradFn fn = [&](const MlpParams& p, MlpGrads* g) {
    tmp.policy_net() = p;
    return tmp.policy_loss(batch, g);
  };
  return gradient_check(fn, agent.policy_net(), probes, rng);
}

inline double grad_err_q(const QAgent& agent,
                         const std::vector<Transition>& batch, int probes,
                         Rng& rng) {
  const Vec targets = agent.q_targets(batch);
  QAgent tmp = agent;
  LossGradFn fn = [&](const MlpParams& p, MlpGrads* g) {
    tmp.q_net() = p;
    return tmp.q_loss(batch, targets, g);
  };
  return gradient_check(fn, agent.q_net(), probes, rng);
}

inline double grad_err_critic(const AcAgent& agent,
                              const std::vector<Transition>& batch, int probes,
                              Rng& rng) {
  const Vec targets = agent.critic_targets(batch);
  AcAgent tmp = agent;
  LossGradFn fn = [&](const MlpParams& p, MlpGrads* g) {
    tmp.critic_net() = p;
    return tmp.critic_loss(batch, targets, g);
  };
  return gradient_check(fn, agent.critic_net(), probes, rng);
}

inline double grad_err_actor(const AcAgent& agent,
                             const std::vector<Transition>& batch, int probes,
                             Rng& rng) {
  const Vec adv = agent.advantages(batch);
  AcAgent tmp = agent;
  LossGradFn fn = [&](const MlpParams& p, MlpGrads* g) {
    tmp.policy_net() = p;
    return tmp.actor_loss(batch, adv, g);
  };
  return gradient_check(fn, agent.policy_net(), probes, rng);
}

struct SelfCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline std::vector<SelfCheck> run_selftests() {
  std::vector<SelfCheck> out;
  auto add = [&](const std::string& name, bool pass, double value,
                 const std::string& note) {
    std::ostringstream oss;
    oss << note << " = " << value;
    out.push_back({name, pass, oss.str()});
  };

  Rng rng(20240901);

  {
    const auto sm = softmax_with_log({0.3, -1.2, 2.5});
    double sum = 0.0;
    for (double p : sm.probs) sum += p;
    const auto shifted = softmax_with_log({0.3 + 7.0, -1.2 + 7.0, 2.5 + 7.0});
    double max_shift = 0.0;
    for (int i = 0; i < 3; ++i) {
      max_shift = std::max(max_shift, std::abs(sm.probs[i] - shifted.probs[i]));
    }
    add("softmax normalization", std::abs(sum - 1.0) <= 1e-12, sum, "sum");
    add("softmax shift invariance", max_shift <= 1e-12, max_shift, "max dev");
  }
  {
    const double h2 = categorical_entropy({0.5, 0.5});
    add("entropy uniform(2)", std::abs(h2 - std::log(2.0)) <= 1e-12, h2, "H");
  }
  {
    const DiagGaussian a({1.0}, {0.0});
    const DiagGaussian b({0.0}, {0.0});
    const double kl = diag_gaussian_kl(a, b);
    add("gaussian kl N(1,1)||N(0,1)", std::abs(kl - 0.5) <= 1e-12, kl, "kl");
    bool nonneg = true;
    for (int i = 0; i < 200; ++i) {
      DiagGaussian p({rng.next_gaussian(), rng.next_gaussian()},
                     {rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)});
      DiagGaussian q({rng.next_gaussian(), rng.next_gaussian()},
                     {rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)});
      if (diag_gaussian_kl(p, q) < 0.0) nonneg = false;
    }
    add("gaussian kl nonnegative", nonneg, nonneg ? 1 : 0, "ok");
  }
  {
    const auto next = CartPole::dynamics({0, 0, 0, 0}, 10.0);
    const double err = std::max(std::abs(next[1] - 0.02 * 4400.0 / 451.0),
                                std::abs(next[3] + 12.0 / 41.0));
    add("cartpole one-step dynamics", err <= 1e-12, err, "max err");
  }
  {
    Rng probe_rng = rng.derive(11);
    MlpParams net = make_mlp(3, {8}, 2, rng);
    LossGradFn quad = [](const MlpParams& p, MlpGrads* g) {
      double loss = 0.0;
      if (g) *g = zeros_like(p);
      for (std::size_t li = 0; li < p.layers.size(); ++li) {
        for (std::size_t i = 0; i < p.layers[li].weight.data.size(); ++i) {
          const double w = p.layers[li].weight.data[i];
          loss += 0.5 * w * w;
          if (g) (*g)[li].weight.data[i] = w;
        }
        for (std::size_t i = 0; i < p.layers[li].bias.size(); ++i) {
          const double b = p.layers[li].bias[i];
          loss += 0.5 * b * b;
          if (g) (*g)[li].bias[i] = b;
        }
      }
      return loss;
    };
    const double err = gradient_check(quad, net, 20, probe_rng);
    add("gradient_check quadratic", err <= 1e-7, err, "max rel err");
  }

  const EnvSpec env = toy_spec();
  {
    Rng init = rng.derive(21);
    AifConfig cfg;
    cfg.batch_size = 8;
    AifAgent agent(env, cfg, init);
    auto batch = random_batch(env.observation_dim, env.action_count, 8, rng);
    Rng probe = rng.derive(22);
    const double te = grad_err_transition(agent, batch, 25, probe);
    const double ee = grad_err_efe(agent, batch, 25, probe);
    const double pe = grad_err_policy(agent, batch, 25, probe);
    add("gradient transition nll", te <= 1e-4, te, "max rel err");
    add("gradient efe mse", ee <= 1e-4, ee, "max rel err");
    add("gradient policy kl", pe <= 1e-4, pe, "max rel err");
  }
  {
    Rng init = rng.derive(31);
    QConfig cfg;
    cfg.batch_size = 8;
    QAgent agent(env, cfg, init);
    auto batch = random_batch(env.observation_dim, env.action_count, 8, rng);
    Rng probe = rng.derive(32);
    const double qe = grad_err_q(agent, batch, 25, probe);
    add("gradient q mse", qe <= 1e-4, qe, "max rel err");
  }
  {
    Rng init = rng.derive(41);
    AcConfig cfg;
    cfg.batch_size = 8;
    AcAgent agent(env, cfg, init);
    auto batch = random_batch(env.observation_dim, env.action_count, 8, rng);
    Rng probe = rng.derive(42);
    const double ae = grad_err_actor(agent, batch, 25, probe);
    const double ce = grad_err_critic(agent, batch, 25, probe);
    add("gradient actor loss", ae <= 1e-4, ae, "max rel err");
    add("gradient critic mse", ce <= 1e-4, ce, "max rel err");
  }
  {
    ReplayBuffer buf(4);
    bool fifo_ok = true;
    std::vector<Transition> model;
    for (int i = 0; i < 9; ++i) {
      Transition t;
      t.reward = i;
      buf.push(t);
      model.push_back(t);
      if (model.size() > 4) model.erase(model.begin());
      if (buf.size() != model.size()) fifo_ok = false;
    }
    // All residents must come from the model's window.
    Rng srng(7);
    for (int i = 0; i < 200 && fifo_ok; ++i) {
      const auto s = buf.sample(1, srng);
      bool found = false;
      for (const auto& m : model) {
        if (m.reward == s[0].reward) found = true;
      }
      if (!found) fifo_ok = false;
    }
    add("replay fifo eviction", fifo_ok, fifo_ok ? 1 : 0, "ok");
  }
  return out;
}

}  // namespace aif::selftest
